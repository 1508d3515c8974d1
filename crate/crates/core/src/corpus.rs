//! Bundled example models.

use crate::error::Result;
use crate::io::parse_model;
use crate::model::Model;

pub const MODELS: &[(&str, &str)] = &[
    ("friendship", include_str!("../models/friendship.plm")),
    ("smokers_pairwise", include_str!("../models/smokers_pairwise.plm")),
    ("shared_atom", include_str!("../models/shared_atom.plm")),
    ("smokers_friends", include_str!("../models/smokers_friends.plm")),
    ("drinkers", include_str!("../models/drinkers.plm")),
    ("nested", include_str!("../models/nested.plm")),
    ("misaligned", include_str!("../models/misaligned.plm")),
    ("transitivity", include_str!("../models/transitivity.plm")),
    ("ground_chain", include_str!("../models/ground_chain.plm")),
    ("colors", include_str!("../models/colors.plm")),
    ("named_objects", include_str!("../models/named_objects.plm")),
    ("renamed", include_str!("../models/renamed.plm")),
];

pub fn source(name: &str) -> Option<&'static str> {
    MODELS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<Model> {
    let src = source(name).ok_or_else(|| crate::Error::Semantic(format!("no bundled model named {name}")))?;
    parse_model(src)
}
