//! Switch power model: base draw, per-port draw scaled by line-rate share, and
//! control-plane draw from PacketIn / FlowMod message rates.
//!
//! Built-in profiles are measured OpenFlow switches (NEC PF 5240, Open vSwitch
//! and Zodiac FX). Message energies are given in microwatts per packet per
//! second, so a PacketIn rate of 1000/s on the NEC switch adds 0.7113 W.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{RoutingState, SwitchId, Topology};
use crate::num::{from_f64, max_q, q, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchPowerProfile {
    pub name: String,
    /// Draw of a powered switch with no active port, in watts.
    pub base_w: Q,
    /// Draw of one port at full line rate, in watts.
    pub port_w: Q,
    /// Microwatts per PacketIn message.
    pub e_packet_in_uw: Q,
    /// Microwatts per FlowMod message.
    pub e_flow_mod_uw: Q,
}

impl SwitchPowerProfile {
    pub fn nec_pf5240() -> Self {
        SwitchPowerProfile {
            name: "nec".into(),
            base_w: q(11833, 100),
            port_w: q(52, 100),
            e_packet_in_uw: q(71130, 100),
            e_flow_mod_uw: q(2925, 100),
        }
    }

    /// Open vSwitch has no per-port figure; ports cost nothing.
    pub fn ovs() -> Self {
        SwitchPowerProfile {
            name: "ovs".into(),
            base_w: q(487397, 10000),
            port_w: Q::zero(),
            e_packet_in_uw: q(77553, 100),
            e_flow_mod_uw: q(356743, 1000),
        }
    }

    pub fn zodiac_fx() -> Self {
        SwitchPowerProfile {
            name: "zodiac".into(),
            base_w: Q::from_integer(15),
            port_w: q(15, 100),
            e_packet_in_uw: q(77553, 100),
            e_flow_mod_uw: q(145513, 100),
        }
    }

    pub fn builtin() -> Vec<SwitchPowerProfile> {
        vec![Self::nec_pf5240(), Self::ovs(), Self::zodiac_fx()]
    }

    pub fn by_name(name: &str) -> Result<Self> {
        let key = name.to_ascii_lowercase();
        let key = match key.as_str() {
            "nec_pf5240" | "nec-pf5240" | "pf5240" => "nec",
            "openvswitch" | "open_vswitch" => "ovs",
            "zodiac_fx" | "zodiac-fx" | "zodiacfx" => "zodiac",
            other => other,
        };
        Self::builtin()
            .into_iter()
            .find(|p| p.name == key)
            .ok_or_else(|| Error::UnknownProfile(name.to_string()))
    }

    fn validate(self) -> Result<Self> {
        for (field, v) in [
            ("base_w", self.base_w),
            ("port_w", self.port_w),
            ("e_packet_in_uw", self.e_packet_in_uw),
            ("e_flow_mod_uw", self.e_flow_mod_uw),
        ] {
            if v < Q::zero() {
                return Err(Error::Config(format!(
                    "profile `{}`: {field} must be non-negative",
                    self.name
                )));
            }
        }
        Ok(self)
    }
}

#[derive(Deserialize)]
struct ProfileFile {
    #[serde(default)]
    profile: Vec<ProfileEntry>,
}

#[derive(Deserialize)]
struct ProfileEntry {
    name: String,
    base_w: f64,
    #[serde(default)]
    port_w: f64,
    e_packet_in_uw: f64,
    e_flow_mod_uw: f64,
}

/// Reads `[[profile]]` tables with `name`, `base_w`, `port_w`,
/// `e_packet_in_uw` and `e_flow_mod_uw`. Decimal literals are taken at their
/// written value.
pub fn parse_profiles(text: &str) -> Result<Vec<SwitchPowerProfile>> {
    let file: ProfileFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    file.profile
        .into_iter()
        .map(|e| {
            let exact = |field: &str, v: f64| {
                from_f64(v)
                    .ok_or_else(|| Error::Config(format!("profile `{}`: invalid {field}", e.name)))
            };
            SwitchPowerProfile {
                base_w: exact("base_w", e.base_w)?,
                port_w: exact("port_w", e.port_w)?,
                e_packet_in_uw: exact("e_packet_in_uw", e.e_packet_in_uw)?,
                e_flow_mod_uw: exact("e_flow_mod_uw", e.e_flow_mod_uw)?,
                name: e.name.clone(),
            }
            .validate()
        })
        .collect()
}

/// Line-rate share of each active port of one switch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PortLoadVector(Vec<Q>);

impl PortLoadVector {
    pub fn new(loads: Vec<Q>) -> Result<Self> {
        let one = Q::from_integer(1);
        if let Some(bad) = loads.iter().find(|c| **c < Q::zero() || **c > one) {
            return Err(Error::Config(format!("port load {bad} outside [0, 1]")));
        }
        Ok(PortLoadVector(loads))
    }

    pub fn loads(&self) -> &[Q] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Messages per second.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ControlRates {
    pub packet_in: Q,
    pub flow_mod: Q,
}

impl ControlRates {
    pub fn new(packet_in: Q, flow_mod: Q) -> Result<Self> {
        if packet_in < Q::zero() || flow_mod < Q::zero() {
            return Err(Error::Config("control rates must be non-negative".into()));
        }
        Ok(ControlRates {
            packet_in,
            flow_mod,
        })
    }
}

pub fn p_config(profile: &SwitchPowerProfile, loads: &PortLoadVector) -> Q {
    loads
        .0
        .iter()
        .fold(Q::zero(), |acc, c| acc + c * profile.port_w)
}

pub fn p_control(profile: &SwitchPowerProfile, rates: &ControlRates) -> Q {
    (rates.packet_in * profile.e_packet_in_uw + rates.flow_mod * profile.e_flow_mod_uw)
        / Q::from_integer(1_000_000)
}

pub fn switch_power(
    profile: &SwitchPowerProfile,
    loads: &PortLoadVector,
    rates: &ControlRates,
) -> Q {
    profile.base_w + p_config(profile, loads) + p_control(profile, rates)
}

/// One entry per active link at `switch`: the larger directed utility,
/// capped at full line rate. Inactive switches have no ports.
pub fn derive_port_loads(
    topology: &Topology,
    state: &RoutingState,
    switch: SwitchId,
) -> PortLoadVector {
    if !topology.is_switch_active(switch) {
        return PortLoadVector::default();
    }
    let one = Q::from_integer(1);
    let loads = topology
        .neighbors(switch)
        .iter()
        .filter(|&&(_, l)| topology.is_link_active(l))
        .map(|&(_, l)| {
            let u = state.link_utility(l);
            if u > one {
                one
            } else {
                max_q(u, Q::zero())
            }
        })
        .collect();
    PortLoadVector(loads)
}

/// Reactive flow-setup model over a window: the ingress switch of every flow
/// sends one PacketIn, and every switch on its path receives one FlowMod.
pub fn derive_control_rates(
    topology: &Topology,
    state: &RoutingState,
    window_s: Q,
) -> Result<BTreeMap<SwitchId, ControlRates>> {
    if window_s <= Q::zero() {
        return Err(Error::Config(format!(
            "window must be positive, got {window_s}"
        )));
    }
    let mut counts: BTreeMap<SwitchId, (i128, i128)> =
        topology.switches().map(|s| (s, (0, 0))).collect();
    for (_, path) in state.assignment() {
        counts.get_mut(&path.source()).expect("known switch").0 += 1;
        for n in path.nodes() {
            counts.get_mut(n).expect("known switch").1 += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|(s, (pi, fm))| {
            (
                s,
                ControlRates {
                    packet_in: Q::from_integer(pi) / window_s,
                    flow_mod: Q::from_integer(fm) / window_s,
                },
            )
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerReport {
    /// Watts per switch; zero for inactive switches.
    pub per_switch: BTreeMap<SwitchId, Q>,
    pub total: Q,
    pub active_switches: usize,
    /// Mean over active switches; zero when none is active.
    pub avg_active: Q,
    /// Mean over all switches, counting inactive ones as zero.
    pub avg_all: Q,
    pub no_active_switches: bool,
}

pub fn network_power_report(
    topology: &Topology,
    state: &RoutingState,
    profile: &SwitchPowerProfile,
    window_s: Q,
) -> Result<PowerReport> {
    let rates = derive_control_rates(topology, state, window_s)?;
    let mut per_switch = BTreeMap::new();
    let mut total = Q::zero();
    let mut active = 0usize;
    for s in topology.switches() {
        let w = if topology.is_switch_active(s) {
            active += 1;
            switch_power(profile, &derive_port_loads(topology, state, s), &rates[&s])
        } else {
            Q::zero()
        };
        total += w;
        per_switch.insert(s, w);
    }
    let avg_active = if active == 0 {
        Q::zero()
    } else {
        total / Q::from_integer(active as i128)
    };
    let avg_all = if topology.num_switches() == 0 {
        Q::zero()
    } else {
        total / Q::from_integer(topology.num_switches() as i128)
    };
    Ok(PowerReport {
        per_switch,
        total,
        active_switches: active,
        avg_active,
        avg_all,
        no_active_switches: active == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::fixtures::{flow, topo, triangle};
    use crate::net::{prune_idle, Path};
    use crate::num::qi;

    fn idle() -> (PortLoadVector, ControlRates) {
        (PortLoadVector::default(), ControlRates::default())
    }

    #[test]
    fn idle_switches_draw_base() {
        let (l, r) = idle();
        assert_eq!(
            switch_power(&SwitchPowerProfile::nec_pf5240(), &l, &r),
            q(11833, 100)
        );
        assert_eq!(
            switch_power(&SwitchPowerProfile::ovs(), &l, &r),
            q(487397, 10000)
        );
        assert_eq!(
            switch_power(&SwitchPowerProfile::zodiac_fx(), &l, &r),
            qi(15)
        );
    }

    #[test]
    fn config_power() {
        assert_eq!(
            p_config(
                &SwitchPowerProfile::nec_pf5240(),
                &PortLoadVector::default()
            ),
            qi(0)
        );
        let full = PortLoadVector::new(vec![qi(1), qi(1)]).unwrap();
        assert_eq!(
            p_config(&SwitchPowerProfile::nec_pf5240(), &full),
            q(104, 100)
        );
        let half = PortLoadVector::new(vec![q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(
            p_config(&SwitchPowerProfile::zodiac_fx(), &half),
            q(15, 100)
        );
        assert_eq!(p_config(&SwitchPowerProfile::ovs(), &full), qi(0));
        assert!(PortLoadVector::new(vec![q(3, 2)]).is_err());
    }

    #[test]
    fn control_power_units() {
        let nec = SwitchPowerProfile::nec_pf5240();
        assert_eq!(p_control(&nec, &ControlRates::default()), qi(0));
        let pi = ControlRates::new(qi(1000), qi(0)).unwrap();
        assert_eq!(p_control(&nec, &pi), q(7113, 10000));
        let fm = ControlRates::new(qi(0), qi(100)).unwrap();
        assert_eq!(
            p_control(&SwitchPowerProfile::zodiac_fx(), &fm),
            q(145513, 1_000_000)
        );
    }

    #[test]
    fn zodiac_two_full_ports() {
        let full = PortLoadVector::new(vec![qi(1), qi(1)]).unwrap();
        assert_eq!(
            switch_power(
                &SwitchPowerProfile::zodiac_fx(),
                &full,
                &ControlRates::default()
            ),
            q(153, 10)
        );
    }

    #[test]
    fn port_loads_follow_link_utility() {
        let t = triangle();
        let s = RoutingState::from_paths(
            &t,
            vec![flow(&t, "A", "B", 50)],
            vec![Path::from_names(&t, &["A", "B"]).unwrap()],
        )
        .unwrap();
        let pruned = prune_idle(&s, &t);
        let a = t.resolve("A").unwrap();
        assert_eq!(derive_port_loads(&pruned, &s, a).loads(), &[q(1, 2)]);
        let c = t.resolve("C").unwrap();
        assert!(derive_port_loads(&pruned, &s, c).is_empty());
    }

    #[test]
    fn port_loads_pass_through() {
        let t = topo(
            &["A", "B", "C", "D"],
            &[("A", "B", 10), ("A", "C", 10), ("A", "D", 10)],
        );
        let s = RoutingState::from_paths(
            &t,
            vec![
                flow(&t, "A", "B", 2),
                flow(&t, "C", "A", 4),
                flow(&t, "A", "D", 9),
            ],
            vec![
                Path::from_names(&t, &["A", "B"]).unwrap(),
                Path::from_names(&t, &["C", "A"]).unwrap(),
                Path::from_names(&t, &["A", "D"]).unwrap(),
            ],
        )
        .unwrap();
        let a = t.resolve("A").unwrap();
        assert_eq!(
            derive_port_loads(&t, &s, a).loads(),
            &[q(2, 10), q(4, 10), q(9, 10)]
        );
    }

    #[test]
    fn control_rates_attribution() {
        let t = triangle();
        let (a, b, c) = (
            t.resolve("A").unwrap(),
            t.resolve("B").unwrap(),
            t.resolve("C").unwrap(),
        );
        let s = RoutingState::from_paths(
            &t,
            vec![flow(&t, "A", "B", 1)],
            vec![Path::from_names(&t, &["A", "B"]).unwrap()],
        )
        .unwrap();
        let r = derive_control_rates(&t, &s, qi(900)).unwrap();
        assert_eq!(r[&a], ControlRates::new(q(1, 900), q(1, 900)).unwrap());
        assert_eq!(r[&b], ControlRates::new(qi(0), q(1, 900)).unwrap());
        assert_eq!(r[&c], ControlRates::default());

        let none = derive_control_rates(&t, &RoutingState::new(&t, vec![]), qi(900)).unwrap();
        assert!(none.values().all(|r| *r == ControlRates::default()));

        let two = RoutingState::from_paths(
            &t,
            vec![flow(&t, "A", "B", 1), flow(&t, "A", "B", 1)],
            vec![
                Path::from_names(&t, &["A", "B"]).unwrap(),
                Path::from_names(&t, &["A", "C", "B"]).unwrap(),
            ],
        )
        .unwrap();
        let r = derive_control_rates(&t, &two, qi(900)).unwrap();
        assert_eq!(r[&a], ControlRates::new(q(2, 900), q(2, 900)).unwrap());
    }

    #[test]
    fn network_report() {
        let t = triangle();
        let s = RoutingState::from_paths(
            &t,
            vec![flow(&t, "A", "B", 50)],
            vec![Path::from_names(&t, &["A", "B"]).unwrap()],
        )
        .unwrap();
        let pruned = prune_idle(&s, &t);
        let nec = SwitchPowerProfile::nec_pf5240();
        let r = network_power_report(&pruned, &s, &nec, qi(900)).unwrap();
        assert_eq!(r.active_switches, 2);
        for (sw, w) in &r.per_switch {
            if pruned.is_switch_active(*sw) {
                assert!(*w >= nec.base_w);
            } else {
                assert_eq!(*w, qi(0));
            }
        }
        assert_eq!(r.total, r.per_switch.values().sum::<Q>());
        assert_eq!(r.avg_active, r.total / 2);
        assert_eq!(r.avg_all, r.total / 3);

        let empty = RoutingState::new(&t, vec![]);
        let dark = prune_idle(&empty, &t);
        let r = network_power_report(&dark, &empty, &nec, qi(900)).unwrap();
        assert!(r.no_active_switches);
        assert_eq!(r.total, qi(0));
        assert_eq!(r.avg_active, qi(0));
    }

    #[test]
    fn idle_active_zodiac_is_base() {
        // Active but carrying nothing (topology not pruned).
        let t = triangle();
        let s = RoutingState::new(&t, vec![]);
        let r = network_power_report(&t, &s, &SwitchPowerProfile::zodiac_fx(), qi(900)).unwrap();
        assert!(r.per_switch.values().all(|w| *w == qi(15)));
    }

    #[test]
    fn profiles_from_toml() {
        let text = r#"
            [[profile]]
            name = "lab"
            base_w = 118.33
            port_w = 0.52
            e_packet_in_uw = 711.30
            e_flow_mod_uw = 29.25
        "#;
        let p = parse_profiles(text).unwrap();
        assert_eq!(p[0].base_w, SwitchPowerProfile::nec_pf5240().base_w);
        assert_eq!(
            p[0].e_packet_in_uw,
            SwitchPowerProfile::nec_pf5240().e_packet_in_uw
        );
        let bad = text.replace("0.52", "-1");
        assert!(parse_profiles(&bad).is_err());
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(SwitchPowerProfile::by_name("NEC").unwrap().name, "nec");
        assert_eq!(
            SwitchPowerProfile::by_name("zodiac").unwrap().base_w,
            qi(15)
        );
        assert!(SwitchPowerProfile::by_name("cisco").is_err());
    }
}
