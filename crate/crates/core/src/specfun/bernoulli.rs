use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Float;

use crate::precision::pi;

type Table = Arc<Vec<Float>>;

fn cache() -> &'static Mutex<HashMap<u32, Table>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Table>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// B_{2k} / (2k)! for k = 1..=count, at `prec` bits. Entry `i` holds k = i + 1.
///
/// Uses B_{2k}/(2k)! = (-1)^{k+1} 2 zeta(2k) / (2 pi)^{2k}. Tables are memoised
/// per precision; the values do not depend on how they were cached.
pub(crate) fn scaled_bernoulli(count: usize, prec: u32) -> Table {
    {
        let guard = cache().lock().expect("bernoulli cache poisoned");
        if let Some(t) = guard.get(&prec) {
            if t.len() >= count {
                return Arc::clone(t);
            }
        }
    }
    let count = count.max(16).next_power_of_two();
    let wp = prec + 32;
    let two_pi = Float::with_val(wp, pi(wp) * 2u32);
    let inv_sq = Float::with_val(wp, two_pi.square_ref()).recip();
    let mut scale = Float::with_val(wp, 2u32);
    let mut table = Vec::with_capacity(count);
    for k in 1..=count {
        scale *= &inv_sq;
        let z = Float::with_val(wp, Float::zeta_u(2 * k as u32));
        let mut v = Float::with_val(prec, &scale * &z);
        if k % 2 == 0 {
            v = -v;
        }
        table.push(v);
    }
    let table = Arc::new(table);
    cache()
        .lock()
        .expect("bernoulli cache poisoned")
        .insert(prec, Arc::clone(&table));
    table
}
