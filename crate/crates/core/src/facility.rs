//! Plant location with a nonlinear construction cost, linearized by SOS2
//! convex-combination variables over capacity breakpoints.
//!
//! Per site `s` the model has shipments `f[s][k] ≥ 0` to each customer `k`
//! (unit cost = Euclidean distance), breakpoint weights `λ[s][b] ∈ [0, 1]`
//! forming an SOS2 set, installed capacity `z[s] = Σ λ z_b` and an open flag
//! `o[s]` bounding `z[s]` and counted against `max_open`. A site is open
//! when it installs positive capacity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mip::{solve_mip, Model, Relation, Sense, SolveParams, Solution, SosKind, SosSet, VarKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: u64,
    pub x: f64,
    pub y: f64,
    /// Largest capacity that can be built here.
    pub capacity: f64,
    /// Overrides the instance-wide curve for this site.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_curve: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    pub id: u64,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacilityInstance {
    pub sites: Vec<Site>,
    pub customers: Vec<Customer>,
    /// `(capacity, construction cost)` breakpoints shared by sites without
    /// their own curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_curve: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_open: Option<usize>,
}

/// Breakpoints at 0, ¼, ½, ¾ and all of `capacity`, cost `scale·√z`.
pub fn sqrt_cost_curve(capacity: f64, scale: f64) -> Vec<(f64, f64)> {
    (0..=4)
        .map(|q| {
            let z = capacity * q as f64 / 4.0;
            (z, scale * z.sqrt())
        })
        .collect()
}

/// Piecewise-linear interpolation of `curve` at `z`.
pub fn interpolate(curve: &[(f64, f64)], z: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let ((z0, c0), (z1, c1)) = (w[0], w[1]);
        (z >= z0 - 1e-9 && z <= z1 + 1e-9).then(|| c0 + (c1 - c0) * ((z - z0) / (z1 - z0)).clamp(0.0, 1.0))
    })
}

impl FacilityInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn curve(&self, site: usize) -> &[(f64, f64)] {
        self.sites[site]
            .cost_curve
            .as_deref()
            .or(self.cost_curve.as_deref())
            .unwrap_or(&[])
    }

    pub fn distance(&self, site: usize, customer: usize) -> f64 {
        let (s, c) = (&self.sites[site], &self.customers[customer]);
        (s.x - c.x).hypot(s.y - c.y)
    }

    /// Largest capacity site `s` can install: its own limit or the end of its
    /// cost curve, whichever is smaller.
    pub fn max_capacity(&self, site: usize) -> f64 {
        let last = self.curve(site).last().map_or(0.0, |b| b.0);
        self.sites[site].capacity.min(last)
    }

    pub fn total_demand(&self) -> f64 {
        self.customers.iter().map(|c| c.demand).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids: Vec<u64> = self.sites.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("site ids must be unique"));
        }
        let mut ids: Vec<u64> = self.customers.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("customer ids must be unique"));
        }
        for s in &self.sites {
            if !s.x.is_finite() || !s.y.is_finite() {
                return Err(invalid(format!("site {} has non-finite coordinates", s.id)));
            }
            if !(s.capacity >= 0.0) || !s.capacity.is_finite() {
                return Err(invalid(format!("site {} capacity must be nonnegative", s.id)));
            }
        }
        for c in &self.customers {
            if !c.x.is_finite() || !c.y.is_finite() {
                return Err(invalid(format!("customer {} has non-finite coordinates", c.id)));
            }
            if !(c.demand >= 0.0) || !c.demand.is_finite() {
                return Err(invalid(format!("customer {} demand must be nonnegative", c.id)));
            }
        }
        for (k, s) in self.sites.iter().enumerate() {
            let curve = self.curve(k);
            if curve.len() < 2 {
                return Err(invalid(format!("site {} needs a cost curve with ≥ 2 breakpoints", s.id)));
            }
            if curve[0] != (0.0, 0.0) {
                return Err(invalid(format!("site {} cost curve must start at (0, 0)", s.id)));
            }
            if curve.iter().any(|&(z, c)| !z.is_finite() || !c.is_finite()) {
                return Err(invalid(format!("site {} cost curve has non-finite values", s.id)));
            }
            if curve.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(invalid(format!(
                    "site {} cost curve capacities must be strictly increasing",
                    s.id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shipment {
    pub site: u64,
    pub customer: u64,
    pub units: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacilityPlan {
    pub open_sites: Vec<u64>,
    pub installed_capacity: BTreeMap<u64, f64>,
    pub shipments: Vec<Shipment>,
    pub transport_cost: f64,
    pub build_cost: f64,
    pub total_cost: f64,
}

impl FacilityPlan {
    /// Flow conservation, capacity chain and cost replay.
    pub fn verify(&self, inst: &FacilityInstance) -> Result<()> {
        let site_pos = |id: u64| inst.sites.iter().position(|s| s.id == id);
        let cust_pos = |id: u64| inst.customers.iter().position(|c| c.id == id);
        let tol = 1e-6;
        let mut inflow = vec![0.0; inst.customers.len()];
        let mut outflow = vec![0.0; inst.sites.len()];
        let mut transport = 0.0;
        for sh in &self.shipments {
            let (Some(s), Some(c)) = (site_pos(sh.site), cust_pos(sh.customer)) else {
                return Err(Error::Verify(format!("shipment {} → {} names an unknown place", sh.site, sh.customer)));
            };
            if sh.units < -tol {
                return Err(Error::Verify("negative shipment".into()));
            }
            inflow[c] += sh.units;
            outflow[s] += sh.units;
            transport += sh.units * inst.distance(s, c);
        }
        for (c, got) in inst.customers.iter().zip(&inflow) {
            if (got - c.demand).abs() > tol * c.demand.max(1.0) {
                return Err(Error::Verify(format!("customer {} receives {got}, demands {}", c.id, c.demand)));
            }
        }
        let mut build = 0.0;
        for (s, site) in inst.sites.iter().enumerate() {
            let z = self.installed_capacity.get(&site.id).copied().unwrap_or(0.0);
            if outflow[s] > z + tol * z.max(1.0) {
                return Err(Error::Verify(format!("site {} ships {} over installed {z}", site.id, outflow[s])));
            }
            if z > inst.max_capacity(s) + tol * z.max(1.0) || z < -tol {
                return Err(Error::Verify(format!("site {} installs {z} beyond its limit", site.id)));
            }
            let open = self.open_sites.contains(&site.id);
            if open != (z > tol) {
                return Err(Error::Verify(format!("site {} open flag disagrees with capacity {z}", site.id)));
            }
            build += interpolate(inst.curve(s), z)
                .ok_or_else(|| Error::Verify(format!("site {} capacity {z} outside its curve", site.id)))?;
        }
        if let Some(max) = inst.max_open {
            if self.open_sites.len() > max {
                return Err(Error::Verify(format!("{} sites open, at most {max} allowed", self.open_sites.len())));
            }
        }
        let scale = 1e-6 * self.total_cost.abs().max(1.0);
        if (transport - self.transport_cost).abs() > scale
            || (build - self.build_cost).abs() > scale
            || (transport + build - self.total_cost).abs() > scale
        {
            return Err(Error::Verify(format!(
                "replayed costs {transport} + {build} disagree with reported {} + {} = {}",
                self.transport_cost, self.build_cost, self.total_cost
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacilityVars {
    /// `ship[site][customer]`.
    pub ship: Vec<Vec<usize>>,
    /// `lambda[site][breakpoint]`.
    pub lambda: Vec<Vec<usize>>,
    pub capacity: Vec<usize>,
    pub open: Vec<usize>,
}

pub fn build_facility(inst: &FacilityInstance) -> Result<(Model, FacilityVars)> {
    inst.validate()?;
    let (ns, nc) = (inst.sites.len(), inst.customers.len());
    let mut model = Model::new(Sense::Minimize);
    let mut objective = Vec::new();

    let mut ship = Vec::with_capacity(ns);
    for s in 0..ns {
        let mut row = Vec::with_capacity(nc);
        for c in 0..nc {
            let v = model.add_variable(format!("f_{s}_{c}"), 0.0, f64::INFINITY, VarKind::Continuous)?;
            objective.push((v, inst.distance(s, c)));
            row.push(v);
        }
        ship.push(row);
    }
    let mut lambda = Vec::with_capacity(ns);
    let mut capacity = Vec::with_capacity(ns);
    let mut open = Vec::with_capacity(ns);
    for s in 0..ns {
        let curve = inst.curve(s);
        let lam = curve
            .iter()
            .enumerate()
            .map(|(b, &(_, cost))| {
                let v = model.add_variable(format!("l_{s}_{b}"), 0.0, 1.0, VarKind::Continuous)?;
                objective.push((v, cost));
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        let z = model.add_variable(format!("z_{s}"), 0.0, inst.max_capacity(s), VarKind::Continuous)?;
        let o = model.add_binary(format!("o_{s}"))?;

        model.add_linear_constraint(lam.iter().map(|&v| (v, 1.0)).collect(), Relation::Eq, 1.0)?;
        let mut def = vec![(z, 1.0)];
        def.extend(lam.iter().zip(curve).skip(1).map(|(&v, &(zb, _))| (v, -zb)));
        model.add_linear_constraint(def, Relation::Eq, 0.0)?;
        model.add_linear_constraint(vec![(z, 1.0), (o, -inst.max_capacity(s))], Relation::Le, 0.0)?;
        let mut out: Vec<(usize, f64)> = ship[s].iter().map(|&v| (v, 1.0)).collect();
        out.push((z, -1.0));
        model.add_linear_constraint(out, Relation::Le, 0.0)?;
        model.add_sos(SosKind::Sos2, lam.iter().zip(curve).map(|(&v, &(zb, _))| (v, zb)).collect())?;

        lambda.push(lam);
        capacity.push(z);
        open.push(o);
    }
    for (c, cust) in inst.customers.iter().enumerate() {
        let inflow = (0..ns).map(|s| (ship[s][c], 1.0)).collect();
        model.add_linear_constraint(inflow, Relation::Eq, cust.demand)?;
    }
    if let Some(max) = inst.max_open {
        model.add_linear_constraint(open.iter().map(|&o| (o, 1.0)).collect(), Relation::Le, max as f64)?;
    }
    model.set_objective(objective, 0.0)?;
    Ok((
        model,
        FacilityVars {
            ship,
            lambda,
            capacity,
            open,
        },
    ))
}

pub fn decode_facility(solution: &Solution, vars: &FacilityVars, inst: &FacilityInstance) -> Result<FacilityPlan> {
    let Some(objective) = solution.objective else {
        return Err(Error::NoIncumbent);
    };
    let x = &solution.values;
    let mut plan = FacilityPlan {
        open_sites: Vec::new(),
        installed_capacity: BTreeMap::new(),
        shipments: Vec::new(),
        transport_cost: 0.0,
        build_cost: 0.0,
        total_cost: 0.0,
    };
    for (s, site) in inst.sites.iter().enumerate() {
        let set = SosSet {
            kind: SosKind::Sos2,
            members: vars.lambda[s].iter().map(|&v| (v, 0.0)).collect(),
        };
        if !set.is_satisfied(x) {
            return Err(Error::Decode(format!("site {} breakpoint weights are not adjacent", site.id)));
        }
        let z = x[vars.capacity[s]];
        plan.build_cost += vars.lambda[s]
            .iter()
            .zip(inst.curve(s))
            .map(|(&v, &(_, cost))| x[v] * cost)
            .sum::<f64>();
        plan.installed_capacity.insert(site.id, z);
        if z > 1e-6 {
            plan.open_sites.push(site.id);
        }
        for (c, cust) in inst.customers.iter().enumerate() {
            let units = x[vars.ship[s][c]];
            if units > 1e-9 {
                plan.transport_cost += units * inst.distance(s, c);
                plan.shipments.push(Shipment {
                    site: site.id,
                    customer: cust.id,
                    units,
                });
            }
        }
    }
    plan.total_cost = plan.transport_cost + plan.build_cost;
    if (plan.total_cost - objective).abs() > 1e-6 * objective.abs().max(1.0) {
        return Err(Error::Decode(format!(
            "plan cost {} differs from objective {objective}",
            plan.total_cost
        )));
    }
    plan.verify(inst).map_err(|e| Error::Decode(e.to_string()))?;
    Ok(plan)
}

pub fn solve_facility(inst: &FacilityInstance, params: &SolveParams) -> Result<(Solution, Option<FacilityPlan>)> {
    let (model, vars) = build_facility(inst)?;
    let solution = solve_mip(&model, params)?;
    let plan = if solution.has_incumbent() {
        Some(decode_facility(&solution, &vars, inst)?)
    } else {
        None
    };
    Ok((solution, plan))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_site() -> FacilityInstance {
        FacilityInstance {
            sites: vec![Site {
                id: 1,
                x: 0.0,
                y: 0.0,
                capacity: 100.0,
                cost_curve: None,
            }],
            customers: vec![Customer {
                id: 1,
                x: 3.0,
                y: 4.0,
                demand: 10.0,
            }],
            cost_curve: Some(vec![(0.0, 0.0), (100.0, 100.0)]),
            max_open: None,
        }
    }

    #[test]
    fn single_site_ships_everything() {
        let inst = single_site();
        let (s, plan) = solve_facility(&inst, &SolveParams::default()).unwrap();
        let plan = plan.unwrap();
        assert_eq!(plan.open_sites, vec![1]);
        assert_eq!(plan.shipments.len(), 1);
        assert!((plan.shipments[0].units - 10.0).abs() < 1e-9);
        assert!((plan.transport_cost - 50.0).abs() < 1e-9);
        assert!((plan.build_cost - 10.0).abs() < 1e-9);
        assert!((s.objective.unwrap() - 60.0).abs() < 1e-9);
    }

    #[test]
    fn zero_demand_opens_nothing() {
        let mut inst = single_site();
        inst.customers[0].demand = 0.0;
        let (_, plan) = solve_facility(&inst, &SolveParams::default()).unwrap();
        let plan = plan.unwrap();
        assert!(plan.open_sites.is_empty());
        assert_eq!(plan.total_cost, 0.0);
    }

    #[test]
    fn concave_curve_needs_sos2() {
        // Chord from 0 to 100 would price 10 units at 10; the true segment
        // [0, 50] prices them at 10·(80/50) = 16.
        let mut inst = single_site();
        inst.cost_curve = Some(vec![(0.0, 0.0), (50.0, 80.0), (100.0, 100.0)]);
        let (s, plan) = solve_facility(&inst, &SolveParams::default()).unwrap();
        let plan = plan.unwrap();
        assert!((plan.build_cost - 16.0).abs() < 1e-9, "{plan:?}");
        assert!((s.objective.unwrap() - 66.0).abs() < 1e-9);
    }

    #[test]
    fn cardinality_limits() {
        let mut inst = single_site();
        inst.max_open = Some(0);
        let (s, _) = solve_facility(&inst, &SolveParams::default()).unwrap();
        assert_eq!(s.status, crate::mip::SolveStatus::Infeasible);
    }

    #[test]
    fn curve_validation() {
        let mut inst = single_site();
        inst.cost_curve = Some(vec![(1.0, 0.0), (2.0, 1.0)]);
        assert!(inst.validate().is_err());
        inst.cost_curve = Some(vec![(0.0, 0.0), (0.0, 1.0)]);
        assert!(inst.validate().is_err());
        inst.cost_curve = None;
        assert!(inst.validate().is_err());
    }

    #[test]
    fn sqrt_curve_shape() {
        let c = sqrt_cost_curve(1600.0, 10.0);
        assert_eq!(c.len(), 5);
        assert_eq!(c[0], (0.0, 0.0));
        assert_eq!(c[4], (1600.0, 400.0));
        assert_eq!(interpolate(&c, 800.0), Some(10.0 * 800f64.sqrt()));
    }
}
