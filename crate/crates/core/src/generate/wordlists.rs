//! Fixed wordlists and the built-in product catalog used by the simulators.

use super::rng::SimRng;

pub const FIRST_NAMES: [&str; 24] = [
    "Ada", "Bram", "Chloe", "Dries", "Elif", "Femke", "Goran", "Hanna", "Ines", "Jonas", "Kaat",
    "Lars", "Mila", "Noah", "Olga", "Pieter", "Quinn", "Rosa", "Sven", "Tess", "Umar", "Vera",
    "Wout", "Yara",
];

pub const LAST_NAMES: [&str; 20] = [
    "Peeters", "Janssens", "Maes", "Jacobs", "Mertens", "Willems", "Claes", "Goossens", "Wouters",
    "De Smet", "Dubois", "Lambert", "Martin", "Schmidt", "Weber", "Fischer", "Meyer", "Wagner",
    "Becker", "Hoffmann",
];

pub const STREETS: [&str; 16] = [
    "Naamsestraat", "Tiensestraat", "Bondgenotenlaan", "Diestsestraat", "Brusselsestraat",
    "Parkstraat", "Kapucijnenvoer", "Oude Markt", "Hauptstrasse", "Bahnhofstrasse",
    "Schillerplatz", "Lindenweg", "Maple Street", "Station Road", "Church Lane", "Mill Road",
];

pub const CITIES: [&str; 12] = [
    "Leuven", "Gent", "Antwerpen", "Brugge", "Hasselt", "Mechelen", "Mannheim", "Heidelberg",
    "Karlsruhe", "Mainz", "Utrecht", "Maastricht",
];

pub const PAYMENT_METHODS: [&str; 3] = ["credit card", "bank transfer", "paypal"];
pub const CHANNELS: [&str; 3] = ["web", "phone", "store"];
pub const CARRIERS: [&str; 3] = ["bpost", "DHL", "UPS"];
pub const PICKERS: [&str; 5] = ["Anke", "Bert", "Celine", "Dirk", "Eva"];

pub const DEFAULT_RESOURCES: [&str; 6] = ["Alice", "Bob", "Carmen", "Daan", "Emre", "Fleur"];

/// A product of the order-to-delivery catalog. Prices in cents, weights in grams.
#[derive(Debug, Clone, Copy)]
pub struct Product {
    pub name: &'static str,
    pub price_cents: i64,
    pub weight_grams: i64,
}

const fn product(name: &'static str, price_cents: i64, weight_grams: i64) -> Product {
    Product {
        name,
        price_cents,
        weight_grams,
    }
}

pub const CATALOG: [Product; 20] = [
    product("iPhone", 94900, 174),
    product("iPad", 48900, 477),
    product("MacBook Air", 119900, 1240),
    product("MacBook Pro", 199900, 1610),
    product("Apple Watch", 42900, 32),
    product("AirPods", 17900, 45),
    product("HomePod mini", 10900, 345),
    product("Magic Mouse", 8500, 99),
    product("Magic Keyboard", 10900, 239),
    product("USB-C Cable", 1900, 60),
    product("Power Adapter", 2500, 120),
    product("Galaxy S23", 89900, 168),
    product("Galaxy Tab", 54900, 498),
    product("Pixel 8", 79900, 187),
    product("Kindle", 9999, 158),
    product("Echo Dot", 5999, 304),
    product("Fire TV Stick", 3999, 32),
    product("Nintendo Switch", 32900, 398),
    product("PlayStation 5", 54999, 4500),
    product("Xbox Controller", 5999, 287),
];

pub fn person_name(rng: &mut SimRng) -> String {
    format!("{} {}", rng.pick(&FIRST_NAMES), rng.pick(&LAST_NAMES))
}

pub fn bank_account(rng: &mut SimRng) -> String {
    format!(
        "BE{:02} {:04} {:04} {:04}",
        rng.range(10, 99),
        rng.range(0, 9999),
        rng.range(0, 9999),
        rng.range(0, 9999)
    )
}

pub fn address(rng: &mut SimRng) -> String {
    format!(
        "{} {}, {}",
        rng.pick(&STREETS),
        rng.range(1, 250),
        rng.pick(&CITIES)
    )
}

/// An address guaranteed to differ from `current`.
pub fn new_address(rng: &mut SimRng, current: &str) -> String {
    loop {
        let a = address(rng);
        if a != current {
            return a;
        }
    }
}
