use serde::Serialize;

use super::characteristics::evolve_characteristics;
use super::integrate::Trajectory;
use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::spectral::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum SupportVerdict {
    Pass,
    Fail,
    NotApplicable,
}

/// Smallest interval `[x_first, x_last]` holding every grid point with
/// `|f| > threshold`.
pub fn support_interval<T: Real>(f: &Field<T>, threshold: T) -> Option<(T, T)> {
    let vals = f.values();
    let first = vals.iter().position(|x| x.abs() > threshold)?;
    let last = vals.iter().rposition(|x| x.abs() > threshold)?;
    Some((f.grid().point(first), f.grid().point(last)))
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportReport<T> {
    pub threshold: T,
    pub times: Vec<T>,
    pub m_support: Vec<Option<(T, T)>>,
    pub n_support: Vec<Option<(T, T)>>,
    /// Characteristic images `[φ(t,a), φ(t,b)]` of the initial supports.
    pub m_envelope: Vec<Option<(T, T)>>,
    pub n_envelope: Vec<Option<(T, T)>>,
    pub verdict_m: SupportVerdict,
    pub verdict_n: SupportVerdict,
}

impl<T> SupportReport<T> {
    pub fn verdict(&self) -> SupportVerdict {
        use SupportVerdict::*;
        match (self.verdict_m, self.verdict_n) {
            (Fail, _) | (_, Fail) => Fail,
            (NotApplicable, NotApplicable) => NotApplicable,
            _ => Pass,
        }
    }
}

struct Component<T> {
    supports: Vec<Option<(T, T)>>,
    envelope: Vec<Option<(T, T)>>,
    verdict: SupportVerdict,
}

fn contained<T: Real>(s: Option<(T, T)>, env: Option<(T, T)>, pad: T) -> bool {
    match (s, env) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some((lo, hi)), Some((a, b))) => lo >= a - pad && hi <= b + pad,
    }
}

/// Track the supports of `m` and `n` against the characteristic images of
/// their initial supports, padded by two grid cells. A component whose
/// initial data is above the threshold at either end of the box has no
/// compact support to start from and is reported as not applicable.
pub fn support_diagnostic<T: Real>(traj: &Trajectory<T>, threshold: T) -> Result<SupportReport<T>> {
    if !(threshold > T::zero()) {
        return Err(invalid(format!("support threshold must be positive, got {threshold}")));
    }
    let grid = traj.initial().grid().clone();
    let pad = T::lit(2.0) * grid.dx();
    let ms: Vec<Field<T>> = traj.snapshots.iter().map(|s| s.m()).collect();
    let ns: Vec<Field<T>> = traj.snapshots.iter().map(|s| s.n()).collect();
    let touches_edge = |f: &Field<T>| {
        let v = f.values();
        v[0].abs() > threshold || v[v.len() - 1].abs() > threshold
    };
    let m_init = support_interval(&ms[0], threshold);
    let n_init = support_interval(&ns[0], threshold);
    let mut seeds = Vec::new();
    if let Some((a, b)) = m_init {
        seeds.extend([a, b]);
    }
    if let Some((a, b)) = n_init {
        seeds.extend([a, b]);
    }
    let bundle = evolve_characteristics(traj, &seeds)?;

    let build = |fields: &[Field<T>], init: Option<(T, T)>, offset: usize, use_phi: bool| {
        let supports: Vec<_> = fields.iter().map(|f| support_interval(f, threshold)).collect();
        let envelope: Vec<_> = (0..fields.len())
            .map(|ti| {
                init.map(|_| {
                    let paths = if use_phi { &bundle.phi[ti] } else { &bundle.psi[ti] };
                    (paths[offset], paths[offset + 1])
                })
            })
            .collect();
        let verdict = if touches_edge(&fields[0]) {
            SupportVerdict::NotApplicable
        } else if supports
            .iter()
            .zip(&envelope)
            .all(|(&s, &e)| contained(s, e, pad))
        {
            SupportVerdict::Pass
        } else {
            SupportVerdict::Fail
        };
        Component {
            supports,
            envelope,
            verdict,
        }
    };
    let m = build(&ms, m_init, 0, true);
    let n_offset = if m_init.is_some() { 2 } else { 0 };
    let n = build(&ns, n_init, n_offset, false);
    Ok(SupportReport {
        threshold,
        times: traj.times(),
        m_support: m.supports,
        n_support: n.supports,
        m_envelope: m.envelope,
        n_envelope: n.envelope,
        verdict_m: m.verdict,
        verdict_n: n.verdict,
    })
}
