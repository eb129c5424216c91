use std::f64::consts::PI;

use qhpo::toy_models::ModelKind;
use qhpo::{DimensionSpec, SearchSpace, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mixed_space() -> SearchSpace {
    SearchSpace::new(vec![
        DimensionSpec::discrete("depth", 2.0, 10.0, 2.0),
        DimensionSpec::categorical("kernel", &["linear", "poly", "rbf", "sigmoid", "cosine"]),
        DimensionSpec::discrete("rate", 0.05, 0.5, 0.05),
        DimensionSpec::categorical("flag", &["on", "off"]),
    ])
    .unwrap()
}

#[test]
fn every_lattice_point_round_trips() {
    let space = mixed_space();
    let lattice = space.enumerate_lattice().unwrap();
    assert_eq!(lattice.len(), 5 * 5 * 10 * 2);
    for assignment in &lattice {
        let encoded = space.encode::<f64>(assignment).unwrap();
        assert!(encoded.iter().all(|v| (0.0..=PI).contains(v)));
        assert_eq!(&space.decode(&encoded).unwrap(), assignment);
    }
}

#[test]
fn decode_is_total_on_the_box() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for space in [mixed_space(), ModelKind::Ridge.default_space(), ModelKind::BoostedStumps.default_space()] {
        for _ in 0..2000 {
            let point: Vec<f64> = (0..space.width()).map(|_| rng.gen_range(0.0..=PI)).collect();
            let decoded = space.decode(&point).unwrap();
            // whatever decodes must be encodable again
            space.encode::<f64>(&decoded).unwrap();
        }
        let corners = [vec![0.0; space.width()], vec![PI; space.width()]];
        for corner in corners {
            space.decode(&corner).unwrap();
        }
    }
}

#[test]
fn out_of_space_values_are_rejected() {
    let space = mixed_space();
    let mut assignment = space.enumerate_lattice().unwrap()[0].clone();
    assignment.insert("kernel".into(), Value::from("gaussian"));
    assert!(space.encode::<f64>(&assignment).is_err());
    let mut assignment = space.enumerate_lattice().unwrap()[0].clone();
    assignment.insert("depth".into(), Value::Number(12.0));
    assert!(space.encode::<f64>(&assignment).is_err());
    assert!(space.decode(&[0.0; 3]).is_err());
    assert!(space.decode(&[4.0; 9]).is_err());
}

#[test]
fn toml_round_trip_keeps_the_hash() {
    let space = mixed_space();
    let back = SearchSpace::from_toml_str(&space.to_toml_string()).unwrap();
    assert_eq!(back, space);
    assert_eq!(back.content_hash(), space.content_hash());
}
