use std::collections::{BTreeMap, BTreeSet};

use super::DistsimError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Department {
    pub name: String,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Hosts attached directly to this department.
    pub hosts: Vec<String>,
}

/// A tree of departments, each host attached to exactly one of them.
///
/// Text form: one department per line, nesting by indentation, hosts as
/// `host <name>` lines under their department.
///
/// ```text
/// root
///   D1
///     host h1
///   D2
///     host server
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    depts: Vec<Department>,
    by_name: BTreeMap<String, usize>,
    home: BTreeMap<String, usize>,
}

impl Topology {
    /// A single department holding all of `hosts`.
    pub fn single(name: &str, hosts: impl IntoIterator<Item = String>) -> Topology {
        let mut t = Topology {
            depts: Vec::new(),
            by_name: BTreeMap::new(),
            home: BTreeMap::new(),
        };
        t.add_dept(name.to_string(), None).expect("fresh");
        for h in hosts {
            t.add_host(h, 0).expect("unique hosts");
        }
        t
    }

    fn add_dept(&mut self, name: String, parent: Option<usize>) -> Result<usize, DistsimError> {
        if self.by_name.contains_key(&name) || self.home.contains_key(&name) {
            return Err(DistsimError::Topology(format!("duplicate name '{name}'")));
        }
        let idx = self.depts.len();
        self.by_name.insert(name.clone(), idx);
        self.depts.push(Department {
            name,
            parent,
            children: Vec::new(),
            hosts: Vec::new(),
        });
        if let Some(p) = parent {
            self.depts[p].children.push(idx);
        }
        Ok(idx)
    }

    fn add_host(&mut self, name: String, dept: usize) -> Result<(), DistsimError> {
        if self.by_name.contains_key(&name) || self.home.contains_key(&name) {
            return Err(DistsimError::Topology(format!("duplicate name '{name}'")));
        }
        self.home.insert(name.clone(), dept);
        self.depts[dept].hosts.push(name);
        Ok(())
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn departments(&self) -> &[Department] {
        &self.depts
    }

    pub fn department(&self, i: usize) -> &Department {
        &self.depts[i]
    }

    pub fn department_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// The department a host is attached to.
    pub fn home_of(&self, host: &str) -> Option<usize> {
        self.home.get(host).copied()
    }

    pub fn hosts(&self) -> impl Iterator<Item = &str> {
        self.home.keys().map(String::as_str)
    }

    pub fn is_host(&self, name: &str) -> bool {
        self.home.contains_key(name)
    }

    /// Hosts attached anywhere in the subtree of department `i`.
    pub fn scope(&self, i: usize) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(d) = stack.pop() {
            out.extend(self.depts[d].hosts.iter().cloned());
            stack.extend(self.depts[d].children.iter().copied());
        }
        out
    }

    /// Renders in the indented text form.
    pub fn render(&self) -> String {
        fn walk(t: &Topology, d: usize, depth: usize, out: &mut String) {
            let pad = "  ".repeat(depth);
            out.push_str(&format!("{pad}{}\n", t.depts[d].name));
            for h in &t.depts[d].hosts {
                out.push_str(&format!("{pad}  host {h}\n"));
            }
            for &c in &t.depts[d].children {
                walk(t, c, depth + 1, out);
            }
        }
        let mut out = String::new();
        if !self.depts.is_empty() {
            walk(self, 0, 0, &mut out);
        }
        out
    }
}

/// Parses the indented topology format.
pub fn parse_topology(text: &str) -> Result<Topology, DistsimError> {
    let mut t = Topology {
        depts: Vec::new(),
        by_name: BTreeMap::new(),
        home: BTreeMap::new(),
    };
    // (indent, department) for the current path from the root
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |m: String| DistsimError::Topology(format!("line {}: {m}", i + 1));
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        if line[..indent].contains('\t') {
            return Err(err("indent with spaces, not tabs".into()));
        }
        while stack.last().is_some_and(|&(ind, _)| ind >= indent) {
            stack.pop();
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        match words.as_slice() {
            ["host", name] => {
                let &(_, dept) = stack
                    .last()
                    .ok_or_else(|| err(format!("host '{name}' outside any department")))?;
                t.add_host(name.to_string(), dept).map_err(|e| err(e.to_string()))?;
            }
            [name] => {
                let parent = stack.last().map(|&(_, d)| d);
                if parent.is_none() && !t.depts.is_empty() {
                    return Err(err(format!("second root department '{name}'")));
                }
                let idx = t.add_dept(name.to_string(), parent).map_err(|e| err(e.to_string()))?;
                stack.push((indent, idx));
            }
            _ => {
                return Err(err(format!(
                    "expected a department name or 'host <name>', got '{body}'"
                )))
            }
        }
    }
    if t.depts.is_empty() {
        return Err(DistsimError::Topology("no departments".into()));
    }
    Ok(t)
}
