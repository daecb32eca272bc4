use crate::error::{Error, Result};

/// Precision escalation: start, double on undecidable outcomes, stop at `max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub start: u32,
    pub max: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy {
            start: 128,
            max: 1 << 16,
        }
    }
}

impl PrecisionPolicy {
    pub fn new(start: u32, max: u32) -> Result<Self> {
        if start < super::MIN_PREC || max < start {
            return Err(Error::InvalidArgument(format!(
                "precision policy start={start} max={max}"
            )));
        }
        Ok(PrecisionPolicy { start, max })
    }

    /// Precisions tried in order.
    pub fn ladder(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::successors(Some(self.start), move |&p| {
            (p < self.max).then(|| p.saturating_mul(2).min(self.max))
        })
    }
}

/// Runs `f` at increasing precision until it returns something other than an
/// undecidable error.
pub fn escalate<T>(policy: PrecisionPolicy, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
    let mut last = None;
    for prec in policy.ladder() {
        match f(prec) {
            Err(e) if e.is_undecidable() => last = Some(e),
            other => return other,
        }
    }
    Err(last.unwrap_or_else(|| Error::undecidable("empty precision ladder", policy.max)))
}
