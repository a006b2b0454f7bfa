// Copyright (c) The Lissom Contributors
// SPDX-License-Identifier: Apache-2.0

//! Proof terms with named hypotheses.
//!
//! Kernel certificates refer to hypotheses by their position in the
//! context, which depends on where a subproof ends up. The search builds
//! proofs whose discharged hypotheses carry identifiers instead, and
//! renders them once the final shape is known.

use std::rc::Rc;

use lissom_kernel::Certificate;
use lissom_logic::{Formula, Term};
use num_rational::BigRational;

pub type HypId = u32;

#[derive(Debug)]
pub enum Pf {
    Hyp(HypId),
    AndI(P, P),
    AndE1(P),
    AndE2(P),
    OrI1(P, Formula),
    OrI2(P, Formula),
    OrE(P, HypId, P, HypId, P),
    ImpI(Formula, HypId, P),
    ImpE(P, P),
    NotI(Formula, HypId, P),
    Contra(P),
    ForallI(String, P),
    ForallE(P, Term),
    Refl(Term),
    Rewrite(P, P, Vec<usize>),
    Eval(Formula),
    Lia(Vec<BigRational>, Vec<P>),
    Axiom(String, Vec<(String, Term)>),
}

pub type P = Rc<Pf>;

pub fn rc(p: Pf) -> P {
    Rc::new(p)
}

/// Kernel certificate for `p` checked from an empty context.
pub fn render(p: &Pf) -> Certificate {
    render_in(p, &mut Vec::new())
}

fn under(env: &mut Vec<HypId>, id: HypId, p: &Pf) -> Certificate {
    env.push(id);
    let c = render_in(p, env);
    env.pop();
    c
}

fn render_in(p: &Pf, env: &mut Vec<HypId>) -> Certificate {
    use Certificate as C;
    match p {
        Pf::Hyp(id) => {
            let i = env.iter().rposition(|h| h == id).expect("hypothesis in scope");
            C::Hyp(i)
        }
        Pf::AndI(a, b) => C::and_i(render_in(a, env), render_in(b, env)),
        Pf::AndE1(a) => C::and_e1(render_in(a, env)),
        Pf::AndE2(a) => C::and_e2(render_in(a, env)),
        Pf::OrI1(a, f) => C::or_i1(render_in(a, env), f.clone()),
        Pf::OrI2(a, f) => C::or_i2(render_in(a, env), f.clone()),
        Pf::OrE(d, i, l, j, r) => {
            let d = render_in(d, env);
            let l = under(env, *i, l);
            C::or_e(d, l, under(env, *j, r))
        }
        Pf::ImpI(f, i, b) => C::imp_i(f.clone(), under(env, *i, b)),
        Pf::ImpE(a, b) => C::imp_e(render_in(a, env), render_in(b, env)),
        Pf::NotI(f, i, b) => C::not_i(f.clone(), under(env, *i, b)),
        Pf::Contra(a) => C::contra(render_in(a, env)),
        Pf::ForallI(x, b) => C::forall_i(x.clone(), render_in(b, env)),
        Pf::ForallE(a, t) => C::forall_e(render_in(a, env), t.clone()),
        Pf::Refl(t) => C::Refl(t.clone()),
        Pf::Rewrite(e, t, ps) => C::rewrite(render_in(e, env), render_in(t, env), ps.clone()),
        Pf::Eval(f) => C::Eval(f.clone()),
        Pf::Lia(cs, ps) => C::Lia(cs.clone(), ps.iter().map(|p| render_in(p, env)).collect()),
        Pf::Axiom(id, inst) => C::Axiom(id.clone(), inst.clone()),
    }
}
