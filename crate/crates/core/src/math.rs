//! Small numeric helpers. Float intrinsics route through `libm` so the
//! crate stays `no_std`.

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Neumaier-compensated running sum. The mass series and the L1 norms feed
/// thousands of terms spanning many orders of magnitude into these sums;
/// plain accumulation costs a couple of digits we want to keep.
#[derive(Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if abs(self.sum) >= abs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Kahan::default();
    for (x, y) in a.iter().zip(b) {
        acc.add(abs(x - y));
    }
    acc.value()
}

pub(crate) fn l1_norm(a: &[f64]) -> f64 {
    let mut acc = Kahan::default();
    for x in a {
        acc.add(abs(*x));
    }
    acc.value()
}
