//! Shared machinery for applying composition words of lowering operators to
//! a tracked prefactor through jet arithmetic. The represented function is
//! g * f for a fixed reference factor f; each operator application consumes
//! one jet order. Words sharing a common tail share the corresponding
//! partial applications, so the whole composition family of order r costs
//! 2^r - 1 operator applications instead of (r+1) 2^(r-2).

use crate::jet::{Coeff, Jet, JetError, JetSpace};
use std::sync::Arc;

/// Assembled operator data for one (order, base point) context. The space
/// and reciprocal tables are shared so that per-node rebuilds (the
/// quadrature oracle assembles fresh operators at every screening
/// configuration) stay cheap.
pub(crate) struct LoweringOps<C: Coeff> {
    pub space: Arc<JetSpace>,
    pub r: u32,
    pub n_insertions: usize,
    /// ops[n] is the multiplicative jet of the index-n operator acting on
    /// g = 1, for n = 1..=r (slot 0 unused).
    pub ops: Vec<Jet<C>>,
    /// recip_pow[l][m] = (t_l - t)^(-m) for l = 1..=N, m = 0..=r
    /// (slot l = 0 unused).
    pub recip_pow: Arc<Vec<Vec<Jet<C>>>>,
}

impl<C: Coeff> LoweringOps<C> {
    /// Apply the index-n operator to g; one order is consumed.
    pub fn apply(&self, n: u32, g: &Jet<C>) -> Result<Jet<C>, JetError> {
        if g.order() == 0 {
            return Err(JetError::OrderExhausted);
        }
        let out_order = g.order() - 1;
        let mut acc = self.space.mul(&self.ops[n as usize], g, Some(out_order));
        if n == 1 {
            let d = self.space.partial(0, g);
            acc = self
                .space
                .add(&acc, &self.space.truncate(&d, out_order))
                .expect("same order");
        } else {
            for l in 1..=self.n_insertions {
                let d = self.space.partial(l, g);
                let term =
                    self.space
                        .mul(&self.recip_pow[l][(n - 1) as usize], &d, Some(out_order));
                acc = self.space.add(&acc, &self.space.neg(&term)).expect("same order");
            }
        }
        Ok(acc)
    }

    /// Constant-term value of every composition word of r applied to g = 1,
    /// ordered like `bsa::compositions` (length, then lexicographic).
    pub fn word_values(&self) -> Result<Vec<(Vec<u32>, C)>, JetError> {
        let mut out = Vec::with_capacity(1usize << (self.r - 1).min(20));
        let mut stack = Vec::new();
        self.dfs(0, None, &mut stack, &mut out)?;
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        Ok(out)
    }

    fn dfs(
        &self,
        applied_sum: u32,
        g: Option<&Jet<C>>,
        stack: &mut Vec<u32>,
        out: &mut Vec<(Vec<u32>, C)>,
    ) -> Result<(), JetError> {
        if applied_sum == self.r {
            let mut word = stack.clone();
            word.reverse();
            out.push((word, g.expect("nonempty word").constant_term().clone()));
            return Ok(());
        }
        for n in 1..=(self.r - applied_sum) {
            let needed = self.r - applied_sum - n;
            let child = match g {
                // Applying to the constant 1: the derivative terms vanish
                // and the result is the operator jet itself.
                None => self.space.truncate(&self.ops[n as usize], needed),
                Some(g) => self.space.truncate(&self.apply(n, g)?, needed),
            };
            stack.push(n);
            self.dfs(applied_sum + n, Some(&child), stack, out)?;
            stack.pop();
        }
        Ok(())
    }
}
