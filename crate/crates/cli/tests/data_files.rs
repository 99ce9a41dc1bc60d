//! Every shipped data file parses, loads, and round-trips through its document type.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use quasimetric::io::{BallDoc, BatteryDoc, DistributorDoc, FamilyDoc, Loader, NetDoc, SpaceDoc, WeightDoc};

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(loader: &Loader, text: &str) -> T {
    let doc: T = loader.parse(text).unwrap();
    let again: T = loader.parse(&serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(again, doc);
    doc
}

#[test]
fn shipped_files_round_trip_and_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let mut seen = 0;
    let s2 = {
        let l = Loader::new(dir.join("s2.json"), 8);
        let doc: SpaceDoc = l.read().unwrap();
        l.space("", &doc).unwrap()
    };
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let text = fs::read_to_string(&path).unwrap();
        let l = Loader::new(&path, 8);
        match name.split(['_', '.']).next().unwrap() {
            "y" | "flat" | "not" => {
                let doc: WeightDoc = round_trip(&l, &text);
                l.weight("", &doc, None).unwrap();
            }
            "ball" => {
                let doc: BallDoc = round_trip(&l, &text);
                l.ball(&doc, &s2).unwrap();
            }
            "balls" => {
                let docs: Vec<BallDoc> = round_trip(&l, &text);
                docs.iter().for_each(|d| drop(l.ball(d, &s2).unwrap()));
            }
            "family" => {
                let doc: FamilyDoc = round_trip(&l, &text);
                l.family(&doc, None).unwrap();
            }
            "net" => {
                let doc: NetDoc = round_trip(&l, &text);
                l.net(&doc).unwrap();
            }
            "battery" => {
                let doc: BatteryDoc = round_trip(&l, &text);
                l.battery(&doc).unwrap();
            }
            "distributor" => {
                let doc: DistributorDoc = round_trip(&l, &text);
                l.distributor(&doc).unwrap();
            }
            _ => {
                let doc: SpaceDoc = round_trip(&l, &text);
                l.space("", &doc).unwrap();
            }
        }
        seen += 1;
    }
    assert!(seen >= 15);
}
