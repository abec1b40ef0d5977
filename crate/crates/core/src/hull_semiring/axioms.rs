use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::Semiring;

/// Semiring laws checked by [`check_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Law {
    PlusAssociative,
    PlusCommutative,
    TimesAssociative,
    TimesCommutative,
    LeftDistributive,
    RightDistributive,
    PlusIdentity,
    TimesIdentity,
    Annihilator,
    PlusIdempotent,
}

impl Law {
    pub const ALL: [Law; 10] = [
        Law::PlusAssociative,
        Law::PlusCommutative,
        Law::TimesAssociative,
        Law::TimesCommutative,
        Law::LeftDistributive,
        Law::RightDistributive,
        Law::PlusIdentity,
        Law::TimesIdentity,
        Law::Annihilator,
        Law::PlusIdempotent,
    ];
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Law::PlusAssociative => "(a+b)+c = a+(b+c)",
            Law::PlusCommutative => "a+b = b+a",
            Law::TimesAssociative => "(a*b)*c = a*(b*c)",
            Law::TimesCommutative => "a*b = b*a",
            Law::LeftDistributive => "a*(b+c) = a*b + a*c",
            Law::RightDistributive => "(b+c)*a = b*a + c*a",
            Law::PlusIdentity => "a+0 = 0+a = a",
            Law::TimesIdentity => "a*1 = 1*a = a",
            Law::Annihilator => "0*a = a*0 = 0",
            Law::PlusIdempotent => "a+a = a",
        };
        f.write_str(s)
    }
}

/// First counterexample found for a law, as indices into the sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawFailure {
    pub law: Law,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub triples_checked: usize,
    pub failures: Vec<LawFailure>,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failure(&self, law: Law) -> Option<&LawFailure> {
        self.failures.iter().find(|f| f.law == law)
    }
}

type FirstFailures = BTreeMap<Law, Vec<usize>>;

fn record(found: &mut FirstFailures, law: Law, indices: &[usize]) {
    found.entry(law).or_insert_with(|| indices.to_vec());
}

fn merge_earliest(mut a: FirstFailures, b: FirstFailures) -> FirstFailures {
    for (law, idx) in b {
        match a.get(&law) {
            Some(existing) if *existing <= idx => {}
            _ => {
                a.insert(law, idx);
            }
        }
    }
    a
}

fn check_from<K: Semiring>(sample: &[K], i: usize) -> FirstFailures {
    let mut found = FirstFailures::new();
    let a = &sample[i];
    let (zero, one) = (K::zero(), K::one());

    if a.plus(&zero) != *a || zero.plus(a) != *a {
        record(&mut found, Law::PlusIdentity, &[i]);
    }
    if a.times(&one) != *a || one.times(a) != *a {
        record(&mut found, Law::TimesIdentity, &[i]);
    }
    if !zero.times(a).is_zero() || !a.times(&zero).is_zero() {
        record(&mut found, Law::Annihilator, &[i]);
    }
    if a.plus(a) != *a {
        record(&mut found, Law::PlusIdempotent, &[i]);
    }

    for (j, b) in sample.iter().enumerate() {
        let ab_plus = a.plus(b);
        let ab_times = a.times(b);
        if ab_plus != b.plus(a) {
            record(&mut found, Law::PlusCommutative, &[i, j]);
        }
        if ab_times != b.times(a) {
            record(&mut found, Law::TimesCommutative, &[i, j]);
        }
        for (k, c) in sample.iter().enumerate() {
            if ab_plus.plus(c) != a.plus(&b.plus(c)) {
                record(&mut found, Law::PlusAssociative, &[i, j, k]);
            }
            if ab_times.times(c) != a.times(&b.times(c)) {
                record(&mut found, Law::TimesAssociative, &[i, j, k]);
            }
            let bc = b.plus(c);
            if a.times(&bc) != ab_times.plus(&a.times(c)) {
                record(&mut found, Law::LeftDistributive, &[i, j, k]);
            }
            if bc.times(a) != b.times(a).plus(&c.times(a)) {
                record(&mut found, Law::RightDistributive, &[i, j, k]);
            }
        }
    }
    found
}

/// Checks every semiring law over all elements, pairs and triples of
/// `sample`. Triples are evaluated in parallel; the reported counterexample
/// for each law is the lexicographically first failing index tuple.
pub fn check_axioms<K: Semiring>(sample: &[K]) -> AxiomReport {
    let found = (0..sample.len())
        .into_par_iter()
        .map(|i| check_from(sample, i))
        .reduce(FirstFailures::new, merge_earliest);
    AxiomReport {
        triples_checked: sample.len().pow(3),
        failures: Law::ALL
            .iter()
            .filter_map(|law| {
                found.get(law).map(|idx| LawFailure {
                    law: *law,
                    indices: idx.clone(),
                })
            })
            .collect(),
    }
}
