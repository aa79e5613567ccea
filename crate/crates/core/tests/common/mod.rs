#![allow(dead_code, clippy::needless_range_loop)]

use bibnet::model::{
    AggregationMap, CountingScheme, EntityId, IncidenceMatrix, Level, PaperRecord,
};
use bibnet::projection::oracle::Rational;
use rand::seq::index::sample;
use rand::Rng;

pub fn sample_records() -> Vec<PaperRecord> {
    vec![
        PaperRecord::authors("p1", &["a1", "a2", "a3"]).unwrap(),
        PaperRecord::authors("p2", &["a1", "a3"]).unwrap(),
        PaperRecord::authors("p3", &["a2", "a4"]).unwrap(),
    ]
}

pub fn entity_name(i: usize) -> String {
    format!("e{i:03}")
}

/// A corpus over at most `max_entities` authors and `1..=max_papers` papers.
/// With `weighted`, every paper carries random credit weights (zeros
/// included) normalised to one.
pub fn random_records<R: Rng>(
    rng: &mut R,
    max_entities: usize,
    max_papers: usize,
    weighted: bool,
) -> Vec<PaperRecord> {
    let entities = rng.gen_range(1..=max_entities);
    let papers = rng.gen_range(1..=max_papers);
    (0..papers)
        .map(|j| {
            let k = rng.gen_range(1..=entities);
            let contributors: Vec<EntityId> = sample(rng, entities, k)
                .into_iter()
                .map(|i| EntityId::author(entity_name(i)).unwrap())
                .collect();
            let weights = weighted.then(|| {
                let raw: Vec<f64> = (0..k)
                    .map(|_| {
                        if rng.gen_bool(0.1) {
                            0.0
                        } else {
                            rng.gen_range(0.01..1.0)
                        }
                    })
                    .collect();
                let total: f64 = raw.iter().sum();
                if total == 0.0 {
                    let mut w = vec![0.0; k];
                    w[0] = 1.0;
                    w
                } else {
                    raw.iter().map(|x| x / total).collect()
                }
            });
            PaperRecord::new(format!("p{j}"), contributors, weights).unwrap()
        })
        .collect()
}

/// A column-stochastic matrix with rational entries `w_i / Σw` for small
/// integer weights, returned both exactly and as the float matrix built from
/// the same columns.
pub fn random_rational_stochastic<R: Rng>(
    rng: &mut R,
    max_entities: usize,
    max_papers: usize,
) -> (Vec<Vec<Rational>>, IncidenceMatrix) {
    let n = rng.gen_range(1..=max_entities);
    let m = rng.gen_range(1..=max_papers);
    let mut exact = vec![vec![Rational::from_integer(0.into()); m]; n];
    let mut columns = Vec::with_capacity(m);
    for j in 0..m {
        let k = rng.gen_range(1..=n);
        let rows = sample(rng, n, k).into_vec();
        let weights: Vec<i64> = rows.iter().map(|_| rng.gen_range(1..=20)).collect();
        let total: i64 = weights.iter().sum();
        let mut column = Vec::with_capacity(k);
        for (&i, &w) in rows.iter().zip(&weights) {
            exact[i][j] = Rational::new(w.into(), total.into());
            column.push((i, w as f64 / total as f64));
        }
        columns.push(column);
    }
    let rows = (0..n)
        .map(|i| EntityId::author(entity_name(i)).unwrap())
        .collect();
    let cols = (0..m).map(|j| format!("p{j}")).collect();
    let a = IncidenceMatrix::from_columns(rows, cols, columns, CountingScheme::FractionalCustom)
        .unwrap();
    (exact, a)
}

/// Random total map from the rows of `a` onto `1..=groups` groups.
pub fn random_map<R: Rng>(rng: &mut R, a: &IncidenceMatrix, to: Level) -> AggregationMap {
    let from = a.rows()[0].level();
    let groups = rng.gen_range(1..=a.entity_count());
    let mut map = AggregationMap::new(from, to);
    for r in a.rows() {
        map.insert(r.id(), format!("g{}", rng.gen_range(0..groups)));
    }
    map
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
