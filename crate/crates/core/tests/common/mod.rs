//! Random parameter and dataset generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use refchoice::dataset::ChoiceDataset;
use refchoice::menu::Menu;
use refchoice::ordu::OrduParams;
use refchoice::rational::{int, q, Rational};
use refchoice::risk::{forced_above, utility_from_rho, AreuParams, Lottery, LotteryData, PrizeSet, RhoVector};
use refchoice::social::{split_universe, FspuParams};
use refchoice::time::{payment_universe, PbduParams};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// Every nonempty subset, as sorted id lists.
pub fn all_menus(ids: &[String]) -> Vec<Vec<String>> {
    Menu::full(ids.len())
        .subsets()
        .filter(|m| !m.is_empty())
        .map(|m| m.iter().map(|i| ids[i].clone()).collect())
        .collect()
}

/// Distinct random menus of size 2..=max_size over `n` alternatives.
pub fn random_menus(rng: &mut ChaCha8Rng, n: usize, count: usize, max_size: usize) -> Vec<Menu> {
    let mut out: Vec<Menu> = Vec::new();
    let idx: Vec<usize> = (0..n).collect();
    for _ in 0..count * 4 {
        if out.len() == count {
            break;
        }
        let k = rng.gen_range(2..=max_size.min(n));
        let m = Menu::from_indices(idx.choose_multiple(rng, k).copied());
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out.sort();
    out
}

pub fn to_ids(ds: &ChoiceDataset, menus: &[Menu]) -> Vec<Vec<String>> {
    menus.iter().map(|m| ds.ids(*m)).collect()
}

/// Random reference order and per-reference utilities in `0..n`; ties allowed.
pub fn random_ordu(rng: &mut ChaCha8Rng, n: usize) -> OrduParams {
    let names = ids(n);
    let mut order = names.clone();
    order.shuffle(rng);
    let utilities = names
        .iter()
        .map(|r| {
            let u = names
                .iter()
                .map(|x| (x.clone(), int(rng.gen_range(0..n as i64))))
                .collect();
            (r.clone(), u)
        })
        .collect();
    OrduParams { order, utilities }
}

pub fn prizes3() -> Vec<Rational> {
    vec![int(0), int(50), int(100)]
}

/// Random lottery with probabilities on the `1/denom` grid.
pub fn random_lottery(rng: &mut ChaCha8Rng, n: usize, denom: i64) -> Lottery {
    let mut cuts: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(0..=denom)).collect();
    cuts.push(0);
    cuts.push(denom);
    cuts.sort();
    Lottery::new(cuts.windows(2).map(|w| q(w[1] - w[0], denom)).collect()).unwrap()
}

/// Random linear extension of the forced risk edges (safer lotteries first).
pub fn risk_consistent_order(
    rng: &mut ChaCha8Rng,
    prizes: &[Rational],
    lotteries: &BTreeMap<String, Lottery>,
) -> Vec<String> {
    let names: Vec<&String> = lotteries.keys().collect();
    let data = LotteryData {
        prizes: PrizeSet::new(prizes.to_vec()).unwrap(),
        lotteries: lotteries.values().cloned().collect(),
    };
    let above = forced_above(&data);
    let mut placed = Menu::EMPTY;
    let mut order = Vec::new();
    while order.len() < names.len() {
        let ready: Vec<usize> = (0..names.len())
            .filter(|&i| !placed.contains(i) && above[i].is_subset(placed))
            .collect();
        let pick = *ready.choose(rng).expect("forced edges are acyclic");
        placed = placed.with(pick);
        order.push(names[pick].clone());
    }
    order
}

/// ρ vectors that weakly decrease along the order, giving utilities that
/// become weakly less concave down the order.
pub fn descending_utilities(rng: &mut ChaCha8Rng, order: &[String], prizes: usize) -> BTreeMap<String, Vec<Rational>> {
    let mut rho: Vec<Rational> = (0..prizes - 2).map(|_| q(rng.gen_range(60..95), 100)).collect();
    let mut out = BTreeMap::new();
    for id in order {
        out.insert(id.clone(), utility_from_rho(&RhoVector(rho.clone())).unwrap());
        if rng.gen_bool(0.5) {
            for r in &mut rho {
                let cut = q(rng.gen_range(0..10), 100);
                if &*r - &cut > q(5, 100) {
                    *r -= cut;
                }
            }
        }
    }
    out
}

/// Random AREU parameters over `n` lotteries and `prizes` prizes.
pub fn random_areu(rng: &mut ChaCha8Rng, n: usize, prizes: usize) -> AreuParams {
    let xs: Vec<Rational> = (0..prizes as i64).map(|i| int(10 * i)).collect();
    let mut lotteries = BTreeMap::new();
    while lotteries.len() < n {
        let l = random_lottery(rng, prizes, 10);
        if !lotteries.values().any(|m| *m == l) {
            lotteries.insert(format!("l{}", lotteries.len()), l);
        }
    }
    let order = risk_consistent_order(rng, &xs, &lotteries);
    let utilities = descending_utilities(rng, &order, prizes);
    let p = AreuParams {
        prizes: xs,
        order,
        lotteries,
        utilities,
    };
    assert!(p.consistency_issues().unwrap().is_empty());
    p
}

pub struct LinkageCase<P> {
    pub params: P,
    pub universe: ChoiceDataset,
    pub menus: Vec<Menu>,
}

/// AREU params whose classes above `q1` use `u(m) = u_hi` and the rest `u_lo`,
/// observed on an Allais-type triple plus random menus. `u_lo == u_hi` when
/// `equal`.
pub fn risk_linkage_case(rng: &mut ChaCha8Rng, equal: bool) -> (AreuParams, Vec<Vec<String>>) {
    let u_hi = q(rng.gen_range(30..90), 100);
    let u_lo = if equal {
        u_hi.clone()
    } else {
        q(rng.gen_range(10..u_hi_numer(&u_hi)), 100)
    };
    let beta = q(rng.gen_range(1..10), 10);
    let half = q(1, 2);
    let one = int(1);
    let a = (&u_hi + &one) / int(2);
    let a2 = &beta * (&u_lo + &a) / int(2) + (&one - &beta) * (&u_hi + &a) / int(2);
    let p1 = Lottery::new(vec![int(0), one.clone(), int(0)]).unwrap();
    let q1 = Lottery::new(vec![&half * (&one - &a), half.clone(), &half * &a]).unwrap();
    let l2 = Lottery::new(vec![&one - &a2, int(0), a2.clone()]).unwrap();
    let q2 = q1.mix(&half, &l2);
    let p2 = Lottery::new(
        p1.0.iter()
            .zip(&q2.0)
            .zip(&q1.0)
            .map(|((p, x), y)| p + (x - y) * int(2))
            .collect(),
    )
    .unwrap();
    let mut lotteries: BTreeMap<String, Lottery> = [("p1", p1), ("p2", p2), ("q1", q1), ("q2", q2)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    let extra = rng.gen_range(0..=4);
    while lotteries.len() < 4 + extra {
        let l = random_lottery(rng, 3, 10);
        if !lotteries.values().any(|m| *m == l) {
            lotteries.insert(format!("x{}", lotteries.len()), l);
        }
    }
    let prizes = prizes3();
    let order = risk_consistent_order(rng, &prizes, &lotteries);
    let cut = order.iter().position(|x| x == "q1").unwrap();
    assert!(order.iter().position(|x| x == "p1").unwrap() < cut);
    let u = |m: &Rational| vec![int(0), m.clone(), int(1)];
    let utilities = order
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), if i < cut { u(&u_hi) } else { u(&u_lo) }))
        .collect();
    let params = AreuParams {
        prizes,
        order,
        lotteries,
        utilities,
    };
    assert!(params.consistency_issues().unwrap().is_empty());
    let names: Vec<String> = params.lotteries.keys().cloned().collect();
    let mut menus: Vec<Vec<String>> = vec![
        vec!["p1".into(), "p2".into()],
        vec!["q1".into(), "q2".into()],
        vec!["p1".into(), "q1".into(), "q2".into()],
    ];
    for m in random_menus(rng, names.len(), 20, 4) {
        let ids: Vec<String> = m.iter().map(|i| names[i].clone()).collect();
        if !menus.contains(&ids) {
            menus.push(ids);
        }
    }
    (params, menus)
}

fn u_hi_numer(u: &Rational) -> i64 {
    (u * int(100)).to_integer().try_into().unwrap()
}

/// Dated payments `(amount, time)` with ids `amount@time`.
pub fn payments(items: &[(i64, i64)]) -> ChoiceDataset {
    let v: Vec<(String, Rational, Rational)> = items
        .iter()
        .map(|(x, t)| (format!("{x}@{t}"), int(*x), int(*t)))
        .collect();
    payment_universe(&v).unwrap()
}

const AMOUNTS: [i64; 6] = [5, 10, 15, 20, 25, 30];

/// Random PBDU params over `AMOUNTS` and reference times `0..=5`.
pub fn random_pbdu(rng: &mut ChaCha8Rng) -> PbduParams {
    let mut l = int(0);
    let mut lu = BTreeMap::new();
    for x in AMOUNTS {
        lu.insert(int(x), l.clone());
        l += q(rng.gen_range(1..20), 10);
    }
    let mut d = q(-rng.gen_range(5..30), 10);
    let mut ld = BTreeMap::new();
    for t in 0..=5 {
        ld.insert(int(t), d.clone());
        if rng.gen_bool(0.4) {
            d = (d * q(rng.gen_range(3..10), 10)).min(q(-1, 100));
        }
    }
    PbduParams::new(lu, ld).unwrap()
}

/// Up to `n` distinct dated payments on `AMOUNTS × 0..=5`.
pub fn random_payments(rng: &mut ChaCha8Rng, n: usize) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    while out.len() < n {
        let p = (*AMOUNTS.choose(rng).unwrap(), rng.gen_range(0..=5));
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Discount `D_lo` at reference time 0 and `D_hi` from time 1 on, with the
/// present-bias pattern built in; `D_lo == D_hi` when `equal`.
pub fn time_linkage_case(rng: &mut ChaCha8Rng, equal: bool) -> LinkageCase<PbduParams> {
    let d_hi = q(-rng.gen_range(1..10), 10);
    let d_lo = if equal {
        d_hi.clone()
    } else {
        &d_hi - q(rng.gen_range(1..10), 10)
    };
    let k = if equal {
        q(rng.gen_range(1..20), 10)
    } else {
        let t = q(rng.gen_range(1..10), 10);
        -(&t * &d_hi + (int(1) - &t) * &d_lo)
    };
    let l_a = -(&d_lo * int(3)) + int(1);
    let l_b = &l_a + &k;
    let mut lu = BTreeMap::new();
    lu.insert(int(5), int(0));
    lu.insert(int(10), l_a);
    lu.insert(int(15), l_b.clone());
    lu.insert(int(20), &l_b + int(1));
    lu.insert(int(25), &l_b + int(2));
    lu.insert(int(30), &l_b + int(3));
    let ld = [(int(0), d_lo), (int(1), d_hi)].into_iter().collect();
    let params = PbduParams::new(lu, ld).unwrap();
    let mut items = vec![(10, 0), (15, 1), (10, 3), (15, 4), (5, 0)];
    let extra = rng.gen_range(0..=3);
    while items.len() < 5 + extra {
        let p = random_payments(rng, 1)[0];
        if !items.contains(&p) {
            items.push(p);
        }
    }
    let universe = payments(&items);
    let m = |ids: &[&str]| universe.menu_of(ids).unwrap();
    let mut menus = vec![m(&["10@0", "15@1"]), m(&["10@3", "15@4"]), m(&["5@0", "10@3", "15@4"])];
    for x in random_menus(rng, items.len(), 20, 4) {
        if !menus.contains(&x) {
            menus.push(x);
        }
    }
    LinkageCase {
        params,
        universe,
        menus,
    }
}

/// Income splits `(own, other)` with ids `own-other`.
pub fn splits(items: &[(Rational, Rational)]) -> ChoiceDataset {
    let v: Vec<(String, Rational, Rational)> = items.iter().map(|s| (ids_for(s), s.0.clone(), s.1.clone())).collect();
    split_universe(&v).unwrap()
}

/// Random FSPU params over references `refs` and payments `ys`: the least
/// equal reference draws increments, each more equal one adds to them.
pub fn random_fspu(rng: &mut ChaCha8Rng, refs: &[Rational], ys: &[Rational]) -> FspuParams {
    let mut refs = refs.to_vec();
    refs.sort();
    let mut inc: Vec<Rational> = (1..ys.len()).map(|_| q(rng.gen_range(1..40), 4)).collect();
    let mut table = BTreeMap::new();
    for r in refs.iter().rev() {
        let mut row = BTreeMap::new();
        let mut v = int(0);
        row.insert(ys[0].clone(), v.clone());
        for (y, d) in ys[1..].iter().zip(&inc) {
            v += d;
            row.insert(y.clone(), v.clone());
        }
        table.insert(r.clone(), row);
        for d in &mut inc {
            if rng.gen_bool(0.5) {
                *d += q(rng.gen_range(0..20), 4);
            }
        }
    }
    FspuParams::new(table).unwrap()
}

/// `v_r(y) = w_r·y` with `w_hi` at a perfectly equal reference and `w_lo`
/// otherwise; the quasi-linearity pattern is built in unless `equal`.
pub fn social_linkage_case(rng: &mut ChaCha8Rng, equal: bool) -> LinkageCase<FspuParams> {
    let w_hi = q(rng.gen_range(10..30), 10);
    let w_lo = if equal {
        w_hi.clone()
    } else {
        q(rng.gen_range(1..numer10(&w_hi)), 10)
    };
    let d = if equal {
        q(rng.gen_range(1..30), 10)
    } else {
        (&w_lo + &w_hi) / int(2)
    };
    let x = int(10);
    let mut items: Vec<(Rational, Rational)> = vec![
        (x.clone(), int(2)),
        (&x - &d, int(3)),
        (&x + int(1), int(2)),
        (&x + int(1) - &d, int(3)),
        (int(1), int(1)),
    ];
    let extra = rng.gen_range(0..=3);
    while items.len() < 5 + extra {
        let s = (int(rng.gen_range(1..=12)), int(rng.gen_range(1..=5)));
        if !items.contains(&s) {
            items.push(s);
        }
    }
    let mut ys: Vec<Rational> = items.iter().map(|(_, y)| y.clone()).collect();
    ys.sort();
    ys.dedup();
    let row = |w: &Rational| ys.iter().map(|y| (y.clone(), w * y)).collect::<BTreeMap<_, _>>();
    let table = [(int(0), row(&w_hi)), (q(1, 100), row(&w_lo))].into_iter().collect();
    let params = FspuParams::new(table).unwrap();
    let universe = splits(&items);
    let m = |xs: &[usize]| Menu::from_indices(xs.iter().map(|&i| universe.index_of(&ids_for(&items[i])).unwrap()));
    let mut menus = vec![m(&[0, 1]), m(&[2, 3, 4]), m(&[0, 1, 4])];
    for x in random_menus(rng, items.len(), 20, 4) {
        if !menus.contains(&x) {
            menus.push(x);
        }
    }
    LinkageCase {
        params,
        universe,
        menus,
    }
}

fn ids_for(s: &(Rational, Rational)) -> String {
    format!(
        "{}-{}",
        refchoice::rational::format(&s.0),
        refchoice::rational::format(&s.1)
    )
}

fn numer10(w: &Rational) -> i64 {
    (w * int(10)).to_integer().try_into().unwrap()
}
