use super::{colp_solve, sld_solve, sres_solve, Config, Verdict};
use crate::par::{self, Parallelism};
use crate::term::{Goal, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Sld,
    Colp,
    Sres,
}

impl Engine {
    pub fn solve(self, g: &Goal, p: &Program, cfg: &Config) -> Verdict {
        match self {
            Engine::Sld => sld_solve(g, p, cfg),
            Engine::Colp => colp_solve(g, p, cfg),
            Engine::Sres => sres_solve(g, p, cfg),
        }
    }
}

/// Solves independent goals against one program. Results are in input
/// order and do not depend on `mode`.
pub fn solve_batch(goals: &[Goal], p: &Program, cfg: &Config, engine: Engine, mode: Parallelism) -> Vec<Verdict> {
    par::map(mode, goals, |g| engine.solve(g, p, cfg))
}
