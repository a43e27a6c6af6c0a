use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::printer::Printer;
use crate::engine::Answer;
use crate::env::deref;
use crate::oracle::RTerm;
use crate::rational::{to_mu, MuError, MuTerm};
use crate::term::{Sym, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnswerStyle {
    /// Fully expanded finite terms.
    Flat,
    /// One equation per cycle entry.
    Mu,
    /// Bindings unfolded a bounded number of times; leftover engine
    /// variables carry a trailing `?`.
    Lazy,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrintError {
    #[error("binding of {0} is cyclic; print it in mu style")]
    MustUseMu(Sym),
    #[error(transparent)]
    Mu(#[from] MuError),
}

/// Names engine variables after the goal variable they first appear under:
/// `X'`, `X''`, ...
struct Namer<'a> {
    goal: &'a HashSet<Sym>,
    primes: HashMap<Sym, usize>,
    printer: Printer,
}

impl Namer<'_> {
    fn name_vars(&mut self, base: &Sym, t: &Term) {
        for w in t.vars() {
            if self.goal.contains(&w) || self.printer.names.contains_key(&w) {
                continue;
            }
            let n = self.primes.entry(base.clone()).or_insert(0);
            *n += 1;
            let name = format!("{base}{}", "'".repeat(*n));
            self.printer.names.insert(w, name);
        }
    }
}

/// Renders the bindings of the goal variables, one `X = t` per line, in goal
/// order. Unbound goal variables are omitted; an empty substitution prints
/// as `true`.
pub fn print_answer(a: &Answer, style: AnswerStyle, unfold: usize) -> Result<String, PrintError> {
    let goal: HashSet<Sym> = a.goal_vars.iter().cloned().collect();
    let mut namer = Namer {
        goal: &goal,
        primes: HashMap::new(),
        printer: Printer::new(),
    };
    let mut lines = Vec::new();
    for v in &a.goal_vars {
        let root = Term::Var(v.clone());
        if deref(&a.bindings, &root).0 == root {
            continue;
        }
        match style {
            AnswerStyle::Flat => {
                let t = a
                    .bindings
                    .resolve_full(&root)
                    .ok_or_else(|| PrintError::MustUseMu(v.clone()))?;
                namer.name_vars(v, &t);
                lines.push(format!("{v} = {}", namer.printer.term(&t)));
            }
            AnswerStyle::Lazy => {
                let t = a.bindings.resolve(&root, unfold);
                namer.name_vars(v, &t);
                for w in t.vars() {
                    if !goal.contains(&w) {
                        namer.printer.marked.insert(w);
                    }
                }
                lines.push(format!("{v} = {}", namer.printer.term(&t)));
            }
            AnswerStyle::Mu => lines.push(mu_line(a, v, &mut namer)?),
        }
    }
    if lines.is_empty() {
        return Ok("true".into());
    }
    Ok(lines.join("\n"))
}

/// Equations of the minimal graph when the binding is ground, otherwise
/// one equation per cycle entry of the binding graph as it stands.
fn minimal_mu(a: &Answer, v: &Sym) -> Result<MuTerm, PrintError> {
    let Some(r) = RTerm::from_env(&a.bindings, &Term::Var(v.clone())) else {
        return Ok(to_mu(&a.bindings, &Term::Var(v.clone()))?);
    };
    let mut n = 0;
    let mut eqs = Vec::new();
    let root = r.to_mu_parts(
        &mut || {
            n += 1;
            Sym::new(&format!("$mu{n:06}"))
        },
        &mut eqs,
    );
    Ok(MuTerm {
        root,
        equations: eqs.into_iter().collect(),
    })
}

fn mu_line(a: &Answer, v: &Sym, namer: &mut Namer<'_>) -> Result<String, PrintError> {
    let mut m = minimal_mu(a, v)?;
    let mut head = m.root.clone();
    let mut local = namer.printer.clone();
    if let Term::Var(e) = &m.root {
        if let Some(rhs) = m.equations.remove(e) {
            local.names.insert(e.clone(), v.to_string());
            head = rhs;
        }
    }
    let saved = std::mem::replace(&mut namer.printer, local);
    namer.name_vars(v, &head);
    for (e, rhs) in &m.equations {
        namer.name_vars(v, &Term::Var(e.clone()));
        namer.name_vars(v, rhs);
    }
    let mut line = format!("{v} = {}", namer.printer.term(&head));
    if !m.equations.is_empty() {
        let eqs: Vec<String> = m
            .equations
            .iter()
            .map(|(e, rhs)| {
                format!(
                    "{} = {}",
                    namer.printer.term(&Term::Var(e.clone())),
                    namer.printer.term(rhs)
                )
            })
            .collect();
        line.push_str(" where ");
        line.push_str(&eqs.join(", "));
    }
    let mut local = std::mem::replace(&mut namer.printer, saved);
    // Keep names given to engine variables, but not the local renaming of
    // the root entry.
    if let Term::Var(e) = &m.root {
        local.names.remove(e);
    }
    for (k, n) in local.names {
        namer.printer.names.entry(k).or_insert(n);
    }
    Ok(line)
}
