//! Indented text rendering of proof trees, conclusion first.

use std::fmt::Write;

use pricelog_core::{LabelledProof, Proof, ProofTree};

fn walk<L>(t: &ProofTree<L>, depth: usize, label: &dyn Fn(&L) -> Option<String>, out: &mut String) {
    let tag = match label(&t.label) {
        Some(l) => format!("{}, {l}", t.rule),
        None => t.rule.to_string(),
    };
    let _ = writeln!(out, "{:indent$}{}   [{tag}]", "", t.conclusion, indent = 2 * depth);
    for p in &t.premises {
        walk(p, depth + 1, label, out);
    }
}

pub fn render_proof(pf: &Proof) -> String {
    let mut out = String::new();
    walk(pf, 0, &|_| None, &mut out);
    out
}

pub fn render_labelled(lpf: &LabelledProof) -> String {
    let mut out = String::new();
    walk(lpf, 0, &|l| Some(l.to_string()), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pricelog_core::{parse_sequent_plain, prove, Builtin, Calculus, SearchLimits};

    #[test]
    fn premises_are_indented_under_their_conclusion() {
        let s = parse_sequent_plain("p & q |- p", &Builtin::Cost).unwrap();
        let pf = prove(&s, Calculus::Priced, SearchLimits::default()).unwrap().proof().unwrap().clone();
        assert_eq!(render_proof(&pf), "p & q |- p   [WithL1]\n  p |- p   [Ax]\n");
    }
}
