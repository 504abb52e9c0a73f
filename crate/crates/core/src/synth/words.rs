//! Word pools shared by the generators.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(crate) const NOUNS: &[&str] = &[
    "revenue",
    "output",
    "rainfall",
    "traffic",
    "sales",
    "demand",
    "exports",
    "imports",
    "budget",
    "yield",
    "energy",
    "visitors",
    "orders",
    "signups",
    "returns",
    "capacity",
    "emissions",
    "growth",
    "coverage",
    "latency",
    "payroll",
    "tickets",
    "shipments",
    "inventory",
    "harvest",
    "ridership",
    "enrollment",
];

pub(crate) const ADJECTIVES: &[&str] = &[
    "annual",
    "regional",
    "quarterly",
    "average",
    "total",
    "net",
    "monthly",
    "urban",
    "rural",
    "domestic",
    "global",
    "seasonal",
    "median",
    "weekly",
    "coastal",
    "northern",
    "southern",
    "projected",
];

pub(crate) const PLACES: &[&str] = &[
    "Avalon",
    "Brookfield",
    "Cedar Vale",
    "Dunmore",
    "Eastport",
    "Fairhaven",
    "Glenrock",
    "Harbor City",
    "Ironwood",
    "Juniper",
    "Kingsbridge",
    "Lakeside",
    "Millbrook",
    "Northgate",
    "Oakridge",
    "Pinecrest",
];

pub(crate) const SOURCES: &[&str] = &[
    "Statistics Office",
    "Annual Survey",
    "Field Report",
    "Census Bureau",
    "Market Review",
    "Open Data Portal",
    "Trade Council",
    "Energy Agency",
];

pub(crate) const UNITS: &[&str] = &[
    "Units",
    "Percent",
    "USD (millions)",
    "Tonnes",
    "Hours",
    "Count",
    "kWh",
    "Index",
];

pub(crate) const CATEGORY_SETS: &[&[&str]] = &[
    &[
        "2015", "2016", "2017", "2018", "2019", "2020", "2021", "2022", "2023", "2024",
    ],
    &[
        "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
    ],
    &["Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7", "Q8"],
    &[
        "North", "South", "East", "West", "Central", "Coastal", "Highland", "Valley",
    ],
    &[
        "Alpha", "Beta", "Gamma", "Delta", "Epsilon", "Zeta", "Eta", "Theta", "Iota",
    ],
];

pub(crate) const FONTS: &[&str] = &[
    "DejaVu Sans",
    "DejaVu Serif",
    "Liberation Sans",
    "Liberation Serif",
    "Noto Sans",
    "Noto Serif",
    "Source Sans Pro",
    "Roboto",
    "Open Sans",
    "Lato",
];

pub(crate) const STORES: &[&str] = &[
    "Corner Market",
    "Blue Door Cafe",
    "Harbor Hardware",
    "Green Leaf Grocer",
    "Sunrise Bakery",
    "City Pharmacy",
    "Lakeside Books",
    "Maple Deli",
    "Union Supply Co",
    "Orchard Produce",
];

pub(crate) const PRODUCTS: &[&str] = &[
    "Coffee",
    "Bagel",
    "Milk 1L",
    "Eggs (12)",
    "Bread",
    "Apples",
    "Bananas",
    "Tea",
    "Notebook",
    "Pen Set",
    "Batteries AA",
    "Light Bulb",
    "Soap",
    "Rice 2kg",
    "Olive Oil",
    "Cheese",
    "Yogurt",
    "Orange Juice",
    "Pasta",
    "Tomatoes",
    "Screws",
    "Tape",
    "Glue",
    "Sandwich",
    "Muffin",
    "Water 500ml",
];

pub(crate) const TOPICS: &[&str] = &[
    "Community Garden",
    "River Cleanup",
    "Night Market",
    "Library Hours",
    "Bike Repair",
    "Coding Club",
    "Farm Stand",
    "Art Walk",
    "Science Fair",
    "Book Swap",
    "Open Studio",
    "Winter Shelter",
];

pub(crate) const HEADINGS: &[&str] = &[
    "Overview",
    "Schedule",
    "Getting There",
    "Volunteers",
    "Frequently Asked",
    "Contact",
    "History",
    "Pricing",
    "Membership",
    "Events",
    "Resources",
    "Partners",
    "Updates",
];

pub(crate) const NAV: &[&str] = &["Home", "About", "News", "Blog", "Shop", "Help", "Login", "Careers"];

pub(crate) const FILLER: &[&str] = &[
    "the", "team", "will", "host", "a", "session", "for", "new", "members", "each", "week", "and", "share", "notes",
    "with", "local", "groups", "about", "plans", "tools", "space", "time", "open", "free", "join", "us", "this",
    "season", "more", "details", "soon", "all", "ages", "welcome", "bring", "friends",
];

pub(crate) fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool.choose(rng).copied().expect("pools are non-empty")
}

/// Picks `n` distinct entries, in pool order shifted by a random offset.
pub(crate) fn pick_distinct<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str], n: usize) -> Vec<&'a str> {
    let start = rng.random_range(0..pool.len());
    (0..n.min(pool.len())).map(|i| pool[(start + i) % pool.len()]).collect()
}

pub(crate) fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// `count` filler words joined by single spaces.
pub(crate) fn phrase(rng: &mut ChaCha8Rng, count: usize) -> String {
    let mut out = String::new();
    for i in 0..count {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(pick(rng, FILLER));
    }
    out
}
