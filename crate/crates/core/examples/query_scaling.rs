//! Oracle-query accounting for `d` iterations with `delta = 1/d`.

use dyncool::certify::query_scaling;
use dyncool::cooling::{evolution_time, query_costs};

fn main() -> dyncool::Result<()> {
    let eps = 0.1;
    let ds = [4, 16, 64, 256, 1024];
    println!("d      t        eiH/iter   UA/iter   eiH total   UA total");
    for &d in &ds {
        let delta = 1.0 / d as f64;
        let q = query_costs(eps, delta)?;
        println!(
            "{d:5}  {:7.3}  {:8}   {:6}   {:9}   {:8}",
            evolution_time(delta),
            q.per_iter_eih,
            q.per_iter_ua,
            d as u64 * q.per_iter_eih,
            d as u64 * q.per_iter_ua
        );
    }
    let (eih, ua) = query_scaling(eps, &ds[..4])?;
    println!("log-log slopes over d = 4..256: eiH {eih:.3}, UA {ua:.3}");
    Ok(())
}
