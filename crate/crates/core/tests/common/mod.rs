//! Minimal reader for the CPLEX LP files the crate writes.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub label: String,
    pub terms: Vec<(f64, String)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct LpModel {
    pub objective: Vec<(f64, String)>,
    pub rows: Vec<Row>,
    pub free: BTreeSet<String>,
    pub lower_zero: BTreeSet<String>,
    pub binary: BTreeSet<String>,
}

impl LpModel {
    pub fn variables(&self) -> BTreeSet<String> {
        let mut v: BTreeSet<String> = self.objective.iter().map(|(_, n)| n.clone()).collect();
        for r in &self.rows {
            v.extend(r.terms.iter().map(|(_, n)| n.clone()));
        }
        v.extend(self.free.iter().cloned());
        v.extend(self.lower_zero.iter().cloned());
        v.extend(self.binary.iter().cloned());
        v
    }

    /// Largest violation of any row, bound or integrality at `point`.
    pub fn max_violation(&self, point: &BTreeMap<String, f64>) -> f64 {
        let val = |n: &str| *point.get(n).unwrap_or_else(|| panic!("no value for {n}"));
        let mut worst: f64 = 0.0;
        for r in &self.rows {
            let lhs: f64 = r.terms.iter().map(|(c, n)| c * val(n)).sum();
            let v = match r.sense {
                Sense::Le => lhs - r.rhs,
                Sense::Ge => r.rhs - lhs,
                Sense::Eq => (lhs - r.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for n in &self.lower_zero {
            worst = worst.max(-val(n));
        }
        for n in &self.binary {
            let x = val(n);
            worst = worst.max(x.min(1.0 - x).max(0.0)).max(-x).max(x - 1.0);
        }
        worst
    }

    pub fn objective_at(&self, point: &BTreeMap<String, f64>) -> f64 {
        self.objective.iter().map(|(c, n)| c * point[n]).sum()
    }
}

fn parse_terms(tokens: &[&str]) -> Vec<(f64, String)> {
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for tok in tokens {
        match *tok {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            t => match t.parse::<f64>() {
                Ok(c) => coef = Some(c),
                Err(_) => {
                    out.push((sign * coef.unwrap_or(1.0), t.to_string()));
                    sign = 1.0;
                    coef = None;
                }
            },
        }
    }
    out
}

pub fn parse_lp(text: &str) -> LpModel {
    #[derive(PartialEq)]
    enum Section {
        None,
        Objective,
        Constraints,
        Bounds,
        Binary,
        End,
    }
    let mut model = LpModel::default();
    let mut section = Section::None;
    let mut pending: Vec<String> = Vec::new();

    let flush = |pending: &mut Vec<String>, model: &mut LpModel| {
        if pending.is_empty() {
            return;
        }
        let joined = pending.join(" ");
        pending.clear();
        let (label, body) = joined.split_once(':').expect("row has a label");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let pos = tokens.iter().position(|t| matches!(*t, "<=" | ">=" | "=")).expect("row has a sense");
        let sense = match tokens[pos] {
            "<=" => Sense::Le,
            ">=" => Sense::Ge,
            _ => Sense::Eq,
        };
        model.rows.push(Row {
            label: label.trim().to_string(),
            terms: parse_terms(&tokens[..pos]),
            sense,
            rhs: tokens[pos + 1].parse().expect("numeric right-hand side"),
        });
    };

    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('\\') {
            continue;
        }
        let next = match trimmed {
            "Minimize" => Some(Section::Objective),
            "Subject To" => Some(Section::Constraints),
            "Bounds" => Some(Section::Bounds),
            "Binary" => Some(Section::Binary),
            "End" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            flush(&mut pending, &mut model);
            section = s;
            continue;
        }
        match section {
            Section::Objective => {
                let body = trimmed.split_once(':').map_or(trimmed, |(_, b)| b);
                let tokens: Vec<&str> = body.split_whitespace().collect();
                model.objective.extend(parse_terms(&tokens));
            }
            Section::Constraints => {
                if trimmed.contains(':') {
                    flush(&mut pending, &mut model);
                }
                pending.push(trimmed.to_string());
            }
            Section::Bounds => {
                let tokens: Vec<&str> = trimmed.split_whitespace().collect();
                match tokens.as_slice() {
                    [name, "free"] => {
                        model.free.insert(name.to_string());
                    }
                    [name, ">=", "0"] => {
                        model.lower_zero.insert(name.to_string());
                    }
                    other => panic!("unsupported bound line {other:?}"),
                }
            }
            Section::Binary => {
                model.binary.extend(trimmed.split_whitespace().map(str::to_string));
            }
            Section::None | Section::End => panic!("unexpected line {trimmed:?}"),
        }
    }
    flush(&mut pending, &mut model);
    assert!(section == Section::End, "missing End");
    model
}
