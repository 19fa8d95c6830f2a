//! Netlists for the resonator and its compensation networks.

use super::netlist::{AcSweep, Element, ElementKind, Netlist, Probe};
use crate::compensation::{CompensationNetwork, Topology};
use crate::resonator::Resonator;

fn push(out: &mut Vec<Element>, kind: ElementKind, name: &str, a: &str, b: &str, value: f64) {
    if value > 0.0 {
        out.push(Element { kind, name: name.into(), a: a.into(), b: b.into(), value });
    }
}

fn bvd_elements(res: &Resonator, top: &str) -> Vec<Element> {
    let mut e = Vec::new();
    push(&mut e, ElementKind::R, "Rm", top, "2", res.r_m);
    push(&mut e, ElementKind::L, "Lm", "2", "3", res.l_m);
    push(&mut e, ElementKind::C, "Cm", "3", "0", res.c_m);
    push(&mut e, ElementKind::C, "C0", top, "0", res.c_0);
    e
}

fn probe(a: &str) -> Option<Probe> {
    Some(Probe { a: a.into(), b: "0".into() })
}

/// Bare resonator between node 1 and ground.
pub fn bvd(res: &Resonator, sweep: Option<AcSweep>) -> Netlist {
    Netlist { elements: bvd_elements(res, "1"), sweep, probe: probe("1") }
}

/// Compensated resonator in the network's topology.
pub fn compensated(res: &Resonator, comp: &CompensationNetwork, sweep: Option<AcSweep>) -> Netlist {
    match comp.topology {
        Topology::Shunt => shunt_tank(res, comp, sweep),
        Topology::Series => series_compensation(res, comp, sweep),
    }
}

/// L0 with its series loss across the resonator plus added capacitance.
pub fn shunt_tank(res: &Resonator, comp: &CompensationNetwork, sweep: Option<AcSweep>) -> Netlist {
    let mut e = bvd_elements(res, "1");
    push_added(&mut e, comp, "1");
    push(&mut e, ElementKind::L, "L0", "1", "4", comp.l_0);
    push(&mut e, ElementKind::R, "RL0", "4", "0", comp.r_l0());
    Netlist { elements: e, sweep, probe: probe("1") }
}

/// L0 with its loss in series with the resonator; probe at the inductor input.
pub fn series_compensation(res: &Resonator, comp: &CompensationNetwork, sweep: Option<AcSweep>) -> Netlist {
    let mut e = Vec::new();
    push(&mut e, ElementKind::L, "L0", "5", "4", comp.l_0);
    push(&mut e, ElementKind::R, "RL0", "4", "1", comp.r_l0());
    e.extend(bvd_elements(res, "1"));
    push_added(&mut e, comp, "1");
    Netlist { elements: e, sweep, probe: probe("5") }
}

fn push_added(e: &mut Vec<Element>, comp: &CompensationNetwork, node: &str) {
    push(e, ElementKind::C, "Cpar", node, "0", comp.c_parasitic);
    push(e, ElementKind::C, "Cfix", node, "0", comp.c_fix);
    push(e, ElementKind::C, "Cbank", node, "0", comp.bank_capacitance());
}
