use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rng::SimRng;
use super::wordlists::{self, CATALOG};
use super::{check_probability, default_start_time, kilograms, money, Clock, GapRange, LogBuilder};
use crate::error::{Error, Result};
use crate::model::{DocelLog, ObjectInstance, Timestamp};

pub const CUSTOMER: &str = "Customer";
pub const ORDER: &str = "Order";
pub const PRODUCT_TYPE: &str = "Product Type";
pub const ITEM: &str = "Item";
pub const PACKAGES: &str = "Packages";

pub const CUSTOMER_ADDRESS: &str = "Customer Address";
pub const WEIGHT: &str = "Weight";
pub const ORDER_PRICE: &str = "Order Price";

const CHANNEL: &str = "Channel";
const PICKER: &str = "Picker";
const PAYMENT_METHOD: &str = "Payment Method";
const CARRIER: &str = "Carrier";

/// Redeliveries after this many failed attempts always succeed.
const MAX_DELIVERY_ATTEMPTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct O2DParams {
    pub num_orders: usize,
    /// Most distinct product types in one order (capped by the catalog size).
    pub max_products: usize,
    /// Most items in one order; the count is uniform in `1..=max_items`.
    pub max_items: usize,
    /// Chance that each picked item is removed again before payment.
    pub p_remove_item: f64,
    pub p_change_address: f64,
    pub p_fail_delivery: f64,
    pub start_time: Timestamp,
    pub inter_event_gap: GapRange,
    pub seed: u64,
    /// Replacement labels keyed by the built-in activity label.
    pub activity_labels: BTreeMap<String, String>,
}

impl Default for O2DParams {
    fn default() -> Self {
        O2DParams {
            num_orders: 100,
            max_products: 20,
            max_items: 70,
            p_remove_item: 0.3,
            p_change_address: 0.25,
            p_fail_delivery: 0.02,
            start_time: default_start_time(),
            inter_event_gap: GapRange::default(),
            seed: 0,
            activity_labels: BTreeMap::new(),
        }
    }
}

impl O2DParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_products == 0 {
            return Err(Error::InvalidParams("max_products must be positive".into()));
        }
        if self.max_items == 0 {
            return Err(Error::InvalidParams("max_items must be positive".into()));
        }
        check_probability("p_remove_item", self.p_remove_item)?;
        check_probability("p_change_address", self.p_change_address)?;
        check_probability("p_fail_delivery", self.p_fail_delivery)?;
        self.inter_event_gap.check()
    }
}

struct LineItem {
    oid: String,
    product: usize,
}

/// Simulates the order-to-delivery process.
///
/// Per order: a new customer places the order (`Create order`, setting the
/// address and zero weight and price), items are added one by one (`Add
/// item`), picked, each possibly removed again (`Remove item`), paid for,
/// packed and sent. Each delivery attempt may be preceded by an address
/// change, which makes it fail, or fail on its own; failed deliveries are
/// re-sent.
pub fn generate_order_to_delivery(p: &O2DParams) -> Result<DocelLog> {
    p.validate()?;
    let mut rng = SimRng::new(p.seed);
    let mut log = LogBuilder::new(
        &[CUSTOMER, ORDER, PRODUCT_TYPE, ITEM, PACKAGES],
        &[CHANNEL, PICKER, PAYMENT_METHOD, CARRIER],
        &[
            (CUSTOMER_ADDRESS, CUSTOMER),
            (WEIGHT, ORDER),
            (ORDER_PRICE, ORDER),
        ],
        &p.activity_labels,
    );

    let product_oids: Vec<String> = (1..=CATALOG.len()).map(|i| format!("pt{i}")).collect();
    for (oid, prod) in product_oids.iter().zip(CATALOG.iter()) {
        log.object(
            ObjectInstance::new(oid.clone(), PRODUCT_TYPE)
                .with_attr("Product Name", prod.name)
                .with_attr("Price", money(prod.price_cents))
                .with_attr("Weight", kilograms(prod.weight_grams)),
        );
    }

    let gap = &p.inter_event_gap;
    let mut arrival = p.start_time;
    let mut item_counter = 0usize;

    for n in 1..=p.num_orders {
        arrival += gap.sample(&mut rng);
        let mut clock = Clock { now: arrival };
        let customer = format!("c{n}");
        let order = format!("o{n}");
        let package = format!("pk{n}");

        log.object(
            ObjectInstance::new(customer.clone(), CUSTOMER)
                .with_attr("Name", wordlists::person_name(&mut rng))
                .with_attr("Bank Account", wordlists::bank_account(&mut rng)),
        );
        log.object(ObjectInstance::new(order.clone(), ORDER));

        let mut address = wordlists::address(&mut rng);
        let (mut grams, mut cents) = (0i64, 0i64);
        log.event(clock.now, "Create order", &[&customer, &order])
            .attr(CHANNEL, *rng.pick(&wordlists::CHANNELS))
            .change(CUSTOMER_ADDRESS, &customer, address.clone().into())
            .change(WEIGHT, &order, kilograms(grams))
            .change(ORDER_PRICE, &order, money(cents));

        let n_items = rng.range(1, p.max_items as u64) as usize;
        let n_products = rng.range(1, p.max_products.min(CATALOG.len()).min(n_items) as u64) as usize;
        let chosen = rng.distinct(CATALOG.len(), n_products);
        let mut items: Vec<LineItem> = Vec::with_capacity(n_items);
        for k in 0..n_items {
            // every chosen product type gets at least one item
            let product = if k < n_products {
                chosen[k]
            } else {
                *rng.pick(&chosen)
            };
            item_counter += 1;
            let item = format!("i{item_counter}");
            let prod = CATALOG[product];
            log.object(
                ObjectInstance::new(item.clone(), ITEM)
                    .with_attr("Price", money(prod.price_cents))
                    .with_attr("Weight", kilograms(prod.weight_grams)),
            );
            grams += prod.weight_grams;
            cents += prod.price_cents;
            let t = clock.tick(gap, &mut rng);
            log.event(t, "Add item", &[&order, &item, &product_oids[product]])
                .change(WEIGHT, &order, kilograms(grams))
                .change(ORDER_PRICE, &order, money(cents));
            items.push(LineItem { oid: item, product });
        }

        let t = clock.tick(gap, &mut rng);
        let mut picked: Vec<&str> = vec![&order];
        picked.extend(items.iter().map(|i| i.oid.as_str()));
        log.event(t, "Pick items", &picked)
            .attr(PICKER, *rng.pick(&wordlists::PICKERS));

        // each item may be removed, but an order never becomes empty
        let mut kept = Vec::with_capacity(items.len());
        let mut remaining = items.len();
        for it in items {
            if remaining > 1 && rng.chance(p.p_remove_item) {
                remaining -= 1;
                let prod = CATALOG[it.product];
                grams -= prod.weight_grams;
                cents -= prod.price_cents;
                let t = clock.tick(gap, &mut rng);
                log.event(t, "Remove item", &[&order, &it.oid, &product_oids[it.product]])
                    .change(WEIGHT, &order, kilograms(grams))
                    .change(ORDER_PRICE, &order, money(cents));
            } else {
                kept.push(it);
            }
        }
        let items = kept;

        let t = clock.tick(gap, &mut rng);
        log.event(t, "Pay order", &[&customer, &order])
            .attr(PAYMENT_METHOD, *rng.pick(&wordlists::PAYMENT_METHODS));

        log.object(
            ObjectInstance::new(package.clone(), PACKAGES)
                .with_attr("Price", money(cents))
                .with_attr("Weight", kilograms(grams)),
        );
        let t = clock.tick(gap, &mut rng);
        let mut packed: Vec<&str> = vec![&order, &package];
        packed.extend(items.iter().map(|i| i.oid.as_str()));
        log.event(t, "Create package", &packed);

        let carrier = *rng.pick(&wordlists::CARRIERS);
        for attempt in 1..=MAX_DELIVERY_ATTEMPTS {
            let t = clock.tick(gap, &mut rng);
            log.event(t, "Send package", &[&order, &package])
                .attr(CARRIER, carrier);
            let last = attempt == MAX_DELIVERY_ATTEMPTS;
            if !last && rng.chance(p.p_change_address) {
                address = wordlists::new_address(&mut rng, &address);
                let t = clock.tick(gap, &mut rng);
                log.event(t, "Change address", &[&customer, &order, &package])
                    .change(CUSTOMER_ADDRESS, &customer, address.clone().into());
                let t = clock.tick(gap, &mut rng);
                log.event(t, "Failed delivery", &[&customer, &order, &package]);
            } else if !last && rng.chance(p.p_fail_delivery) {
                let t = clock.tick(gap, &mut rng);
                log.event(t, "Failed delivery", &[&customer, &order, &package]);
            } else {
                let t = clock.tick(gap, &mut rng);
                log.event(t, "Deliver package", &[&customer, &order, &package]);
                break;
            }
        }
    }

    Ok(log.finish())
}
