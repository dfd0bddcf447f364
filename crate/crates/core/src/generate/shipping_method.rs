use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rng::SimRng;
use super::wordlists;
use super::{
    check_probability, default_start_time, money, Clock, GapRange, LogBuilder, PendingEvent,
};
use crate::error::{Error, Result};
use crate::model::{AttributeValue, DocelLog, ObjectInstance, Timestamp};

pub const CUSTOMERS: &str = "Customers";
pub const PRODUCT_TYPE: &str = "Product Type";
pub const ORDERS: &str = "Orders";

pub const VALUE: &str = "Value";
pub const REFUND: &str = "Refund";
pub const SHIPPING_METHOD: &str = "Shipping Method";

const RESOURCE: &str = "Resource";
const CURRENCY: &str = "Currency";

/// Most units of one product type in an order.
const MAX_QUANTITY: u64 = 4;
const P_FRAGILE: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShipParams {
    pub num_orders: usize,
    pub num_customers: usize,
    pub num_products: usize,
    pub value_threshold: f64,
    pub p_refund: f64,
    pub resource_pool: Vec<String>,
    pub start_time: Timestamp,
    pub inter_event_gap: GapRange,
    pub seed: u64,
    pub activity_labels: BTreeMap<String, String>,
}

impl Default for ShipParams {
    fn default() -> Self {
        ShipParams {
            num_orders: 100,
            num_customers: 50,
            num_products: 3,
            value_threshold: 100.0,
            p_refund: 0.3,
            resource_pool: wordlists::DEFAULT_RESOURCES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            start_time: default_start_time(),
            inter_event_gap: GapRange::default(),
            seed: 0,
            activity_labels: BTreeMap::new(),
        }
    }
}

impl ShipParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_customers == 0 {
            return Err(Error::InvalidParams("num_customers must be positive".into()));
        }
        if self.num_products == 0 {
            return Err(Error::InvalidParams("num_products must be positive".into()));
        }
        if !(self.value_threshold > 0.0 && self.value_threshold.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "value_threshold must be positive, got {}",
                self.value_threshold
            )));
        }
        if self.resource_pool.is_empty() {
            return Err(Error::InvalidParams("resource_pool must not be empty".into()));
        }
        check_probability("p_refund", self.p_refund)?;
        self.inter_event_gap.check()
    }
}

struct ProductType {
    oid: String,
    value_cents: i64,
    fragile: bool,
}

/// Simulates the shipping-method process.
///
/// Every event references the order and its customer and names the resource
/// that executed it. The order value is set on purchase confirmation, the
/// shipping method is "courier" for fragile or expensive orders and "mail"
/// otherwise, and a refund request flips the refund flag and re-ships the
/// return by express courier.
pub fn generate_shipping_method(p: &ShipParams) -> Result<DocelLog> {
    p.validate()?;
    let mut rng = SimRng::new(p.seed);
    let mut log = LogBuilder::new(
        &[CUSTOMERS, PRODUCT_TYPE, ORDERS],
        &[RESOURCE, CURRENCY],
        &[(VALUE, ORDERS), (REFUND, ORDERS), (SHIPPING_METHOD, ORDERS)],
        &p.activity_labels,
    );

    let products: Vec<ProductType> = (1..=p.num_products)
        .map(|i| ProductType {
            oid: format!("pt{i}"),
            value_cents: rng.range(500, 6000) as i64,
            fragile: rng.chance(P_FRAGILE),
        })
        .collect();
    for prod in &products {
        log.object(
            ObjectInstance::new(prod.oid.clone(), PRODUCT_TYPE)
                .with_attr("Value", money(prod.value_cents))
                .with_attr("Fragile", i64::from(prod.fragile)),
        );
    }

    // Draw customers from a pool no larger than half the orders so that some
    // customer always places several orders.
    let active_customers = p.num_customers.min(p.num_orders.div_ceil(2)).max(1);
    let mut customers: Vec<Option<String>> = vec![None; active_customers];

    let gap = &p.inter_event_gap;
    let threshold_cents = (p.value_threshold * 100.0).round() as i64;
    let mut arrival = p.start_time;

    for n in 1..=p.num_orders {
        arrival += gap.sample(&mut rng);
        let order = format!("o{n}");

        let slot = rng.index(active_customers);
        let customer = match &customers[slot] {
            Some(c) => c.clone(),
            None => {
                let c = format!("cu{}", slot + 1);
                log.object(
                    ObjectInstance::new(c.clone(), CUSTOMERS)
                        .with_attr("Name", wordlists::person_name(&mut rng))
                        .with_attr("Bank Account", wordlists::bank_account(&mut rng)),
                );
                customers[slot] = Some(c.clone());
                c
            }
        };

        let n_lines = rng.range(1, p.num_products as u64) as usize;
        let lines: Vec<(usize, u64)> = rng
            .distinct(products.len(), n_lines)
            .into_iter()
            .map(|i| (i, rng.range(1, MAX_QUANTITY)))
            .collect();
        let quantity: u64 = lines.iter().map(|(_, q)| q).sum();
        let value_cents: i64 = lines
            .iter()
            .map(|&(i, q)| products[i].value_cents * q as i64)
            .sum();
        let fragile = lines.iter().any(|&(i, _)| products[i].fragile);
        log.object(ObjectInstance::new(order.clone(), ORDERS).with_attr("Quantity", quantity as i64));

        let mut trace = Trace {
            customer,
            order,
            clock: Clock { now: arrival },
            started: false,
            resources: &p.resource_pool,
            gap,
        };
        let line_oids: Vec<&str> = lines.iter().map(|&(i, _)| products[i].oid.as_str()).collect();
        trace
            .step(&mut log, &mut rng, "Place order", &line_oids)
            .change(VALUE, &trace.order, money(0))
            .change(REFUND, &trace.order, AttributeValue::Integer(0));
        trace
            .step(&mut log, &mut rng, "Confirm purchase", &[])
            .attr(CURRENCY, "EUR")
            .change(VALUE, &trace.order, money(value_cents));
        for &(i, q) in &lines {
            let pt = [products[i].oid.as_str()];
            for _ in 0..q {
                trace.step(&mut log, &mut rng, "Retrieve products", &pt);
                if products[i].fragile {
                    trace.step(&mut log, &mut rng, "Wrap product", &pt);
                }
            }
        }
        trace.step(&mut log, &mut rng, "Confirm shipping information", &[]);
        let courier = fragile || value_cents > threshold_cents;
        let method = if courier { "courier" } else { "mail" };
        trace
            .step(&mut log, &mut rng, "Determine shipping method", &[])
            .change(SHIPPING_METHOD, &trace.order, method.into());
        let ship = if courier { "Ship by courier" } else { "Ship by mail" };
        let (a, b) = if rng.chance(0.5) {
            (ship, "Send invoice")
        } else {
            ("Send invoice", ship)
        };
        for activity in [a, b, "Package arrived", "Determine satisfaction"] {
            trace.step(&mut log, &mut rng, activity, &[]);
        }

        if rng.chance(p.p_refund) {
            trace
                .step(&mut log, &mut rng, "Request refund", &[])
                .change(REFUND, &trace.order, AttributeValue::Integer(1));
            trace
                .step(&mut log, &mut rng, "Confirm shipping information", &[])
                .change(SHIPPING_METHOD, &trace.order, "express courier".into());
            trace.step(&mut log, &mut rng, "Send recollect letter", &[]);
            trace.step(&mut log, &mut rng, "Return package", &[]);
            trace
                .step(&mut log, &mut rng, "Refund customer", &[])
                .attr(CURRENCY, "EUR");
            trace.step(&mut log, &mut rng, "Package arrived", &[]);
            trace.step(&mut log, &mut rng, "Determine satisfaction", &[]);
        }
        trace.step(&mut log, &mut rng, "File order", &[]);
    }

    Ok(log.finish())
}

/// One order's events: each references the customer and the order and
/// carries the executing resource.
struct Trace<'a> {
    customer: String,
    order: String,
    clock: Clock,
    started: bool,
    resources: &'a [String],
    gap: &'a GapRange,
}

impl Trace<'_> {
    fn step<'l>(
        &mut self,
        log: &'l mut LogBuilder,
        rng: &mut SimRng,
        activity: &'static str,
        extra: &[&str],
    ) -> &'l mut PendingEvent {
        let t = if self.started {
            self.clock.tick(self.gap, rng)
        } else {
            self.started = true;
            self.clock.now
        };
        let resource = rng.pick(self.resources).clone();
        let mut objs = vec![self.customer.as_str(), self.order.as_str()];
        objs.extend_from_slice(extra);
        let ev = log.event(t, activity, &objs);
        ev.attr(RESOURCE, resource);
        ev
    }
}
