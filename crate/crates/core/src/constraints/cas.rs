use serde::Serialize;

use crate::algebra::needs_separator;
use crate::graph::MixedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dialect {
    /// Singular.
    A,
    /// Macaulay2.
    B,
}

impl Dialect {
    pub fn extension(self) -> &'static str {
        match self {
            Dialect::A => "sing",
            Dialect::B => "m2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CasTask {
    /// Fiber dimension and degree over generic parameters.
    Identifiability,
    /// Elimination of the edge coefficients.
    VanishingIdeal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CasScript {
    pub dialect: Dialect,
    pub task: CasTask,
    pub text: String,
}

struct Names {
    labels: Vec<String>,
    sep: bool,
}

impl Names {
    fn new(g: &MixedGraph) -> Self {
        Names { labels: g.labels().to_vec(), sep: needs_separator(g.labels()) }
    }

    fn var(&self, prefix: &str, i: usize, j: usize) -> String {
        let (a, b) = (&self.labels[i], &self.labels[j]);
        if self.sep {
            format!("{prefix}{a}_{b}")
        } else {
            format!("{prefix}{a}{b}")
        }
    }
}

/// Rows of `I − Λ` (or a parameter copy) as entry strings.
fn lambda_rows(g: &MixedGraph, names: &Names, prefix: &str) -> Vec<Vec<String>> {
    let n = g.n();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        "1".to_string()
                    } else if g.has_directed(i, j) {
                        format!("-{}", names.var(prefix, i, j))
                    } else {
                        "0".to_string()
                    }
                })
                .collect()
        })
        .collect()
}

fn omega_rows(g: &MixedGraph, names: &Names, prefix: &str) -> Vec<Vec<String>> {
    let n = g.n();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j || g.has_bidirected(i, j) {
                        names.var(prefix, i.min(j), i.max(j))
                    } else {
                        "0".to_string()
                    }
                })
                .collect()
        })
        .collect()
}

fn sigma_rows(g: &MixedGraph, names: &Names) -> Vec<Vec<String>> {
    let n = g.n();
    (0..n).map(|i| (0..n).map(|j| names.var("s", i.min(j), i.max(j))).collect()).collect()
}

fn lambda_vars(g: &MixedGraph, names: &Names, prefix: &str) -> Vec<String> {
    g.directed_edges().map(|(t, h)| names.var(prefix, t, h)).collect()
}

fn omega_vars(g: &MixedGraph, names: &Names, prefix: &str) -> Vec<String> {
    let n = g.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if i == j || g.has_bidirected(i, j) {
                out.push(names.var(prefix, i, j));
            }
        }
    }
    out
}

/// Off-diagonal pairs `i < j` without a bidirected edge.
fn missing_pairs(g: &MixedGraph) -> Vec<(usize, usize)> {
    let n = g.n();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !g.has_bidirected(i, j))
        .collect()
}

fn singular_matrix(name: &str, rows: &[Vec<String>]) -> String {
    let n = rows.len();
    let head = format!("matrix {name}[{n}][{n}] = ");
    let pad = " ".repeat(head.len());
    let mut s = head;
    for (k, r) in rows.iter().enumerate() {
        if k > 0 {
            s.push_str(&pad);
        }
        s.push_str(&r.join(","));
        s.push_str(if k + 1 == n { ";\n" } else { ",\n" });
    }
    s
}

fn m2_matrix(name: &str, rows: &[Vec<String>]) -> String {
    let head = format!("{name} = matrix{{");
    let pad = " ".repeat(head.len());
    let mut s = head;
    for (k, r) in rows.iter().enumerate() {
        if k > 0 {
            s.push_str(&pad);
        }
        s.push('{');
        s.push_str(&r.join(", "));
        s.push('}');
        s.push_str(if k + 1 == rows.len() { "};\n" } else { ",\n" });
    }
    s
}

/// Script for an external computer algebra system. The ideal is generated
/// by the entries of `W = (I − Λ)^T Σ (I − Λ)` over non-edges of `(V, B)`;
/// for cyclic graphs it is saturated by `det(I − Λ)`.
pub fn emit_cas_script(g: &MixedGraph, task: CasTask, dialect: Dialect) -> CasScript {
    let text = match (dialect, task) {
        (Dialect::A, CasTask::Identifiability) => singular_identifiability(g),
        (Dialect::A, CasTask::VanishingIdeal) => singular_vanishing(g),
        (Dialect::B, CasTask::Identifiability) => m2_identifiability(g),
        (Dialect::B, CasTask::VanishingIdeal) => m2_vanishing(g),
    };
    CasScript { dialect, task, text }
}

fn singular_ideal(g: &MixedGraph) -> String {
    let entries: Vec<String> = missing_pairs(g).iter().map(|(i, j)| format!("W[{},{}]", i + 1, j + 1)).collect();
    if entries.is_empty() {
        "ideal(0)".into()
    } else {
        format!("ideal({})", entries.join(","))
    }
}

fn singular_identifiability(g: &MixedGraph) -> String {
    let names = Names::new(g);
    let n = g.n();
    let mut params = vec!["0".to_string()];
    params.extend(lambda_vars(g, &names, "l0"));
    params.extend(omega_vars(g, &names, "w0"));
    let unknowns = lambda_vars(g, &names, "l");
    let mut s = String::from("LIB \"linalg.lib\"; option(redSB);\n");
    if unknowns.is_empty() {
        s.push_str(&format!("ring R = ({}),(x),dp;\n", params.join(",")));
    } else {
        s.push_str(&format!("ring R = ({}),({}),dp;\n", params.join(","), unknowns.join(",")));
    }
    s.push_str(&singular_matrix("L", &lambda_rows(g, &names, "l")));
    s.push_str(&singular_matrix("L0", &lambda_rows(g, &names, "l0")));
    s.push_str(&singular_matrix("W0", &omega_rows(g, &names, "w0")));
    s.push_str(&format!(
        "matrix W[{n}][{n}] = transpose(L)*inverse(transpose(L0))*W0*inverse(L0)*L;\n"
    ));
    if g.is_acyclic() {
        s.push_str(&format!("ideal GB = std({});\n", singular_ideal(g)));
    } else {
        s.push_str(&format!("ideal GB = sat({}, det(L))[1];\n", singular_ideal(g)));
    }
    s.push_str("dim(GB); mult(GB);\n");
    s
}

fn singular_vanishing(g: &MixedGraph) -> String {
    let names = Names::new(g);
    let n = g.n();
    let lam = lambda_vars(g, &names, "l");
    let sig: Vec<String> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| names.var("s", i, j)).collect();
    let mut s = String::from("LIB \"linalg.lib\"; LIB \"elim.lib\"; option(redSB);\n");
    let mut vars = lam.clone();
    vars.extend(sig.iter().cloned());
    if lam.is_empty() {
        s.push_str(&format!("ring R = 0,({}),dp;\n", vars.join(",")));
    } else {
        s.push_str(&format!("ring R = 0,({}),(dp({}),dp({}));\n", vars.join(","), lam.len(), sig.len()));
    }
    s.push_str(&singular_matrix("L", &lambda_rows(g, &names, "l")));
    s.push_str(&singular_matrix("S", &sigma_rows(g, &names)));
    s.push_str(&format!("matrix W[{n}][{n}] = transpose(L)*S*L;\n"));
    s.push_str(&format!("ideal I = {};\n", singular_ideal(g)));
    if !g.is_acyclic() {
        s.push_str("I = sat(I, det(L))[1];\n");
    }
    if lam.is_empty() {
        s.push_str("ideal J = std(I);\n");
    } else {
        s.push_str(&format!("ideal J = eliminate(I, {});\n", lam.join("*")));
    }
    s.push_str("J;\n");
    s.push_str(&ci_saturation_note("//"));
    s
}

fn ci_saturation_note(comment: &str) -> String {
    format!(
        "{comment} The ideal of almost-principal minors from d-separation can be\n\
         {comment} saturated by the product of the principal minors of S; it then\n\
         {comment} often agrees with the ideal computed above.\n"
    )
}

fn m2_ideal(g: &MixedGraph) -> String {
    let entries: Vec<String> = missing_pairs(g).iter().map(|(i, j)| format!("W_({i},{j})")).collect();
    if entries.is_empty() {
        "ideal{0_R}".into()
    } else {
        format!("ideal{{{}}}", entries.join(","))
    }
}

fn m2_vanishing(g: &MixedGraph) -> String {
    let names = Names::new(g);
    let n = g.n();
    let lam = lambda_vars(g, &names, "l");
    let mut groups: Vec<String> = Vec::new();
    if !lam.is_empty() {
        groups.push(lam.join(","));
    }
    for i in 0..n {
        groups.push((i..n).map(|j| names.var("s", i, j)).collect::<Vec<_>>().join(","));
    }
    let mut s = String::new();
    if lam.is_empty() {
        s.push_str(&format!("R = QQ[{}];\n", groups.join(", ")));
    } else {
        s.push_str(&format!("R = QQ[{},\n       MonomialOrder => Eliminate {}];\n", groups.join(", "), lam.len()));
    }
    s.push_str(&m2_matrix("Lambda", &lambda_rows(g, &names, "l")));
    s.push_str(&m2_matrix("S", &sigma_rows(g, &names)));
    s.push_str("W = transpose(Lambda)*S*Lambda;\n");
    s.push_str(&format!("I = {};\n", m2_ideal(g)));
    if !g.is_acyclic() {
        s.push_str("I = saturate(I, det Lambda);\n");
    }
    if lam.is_empty() {
        s.push_str("I\n");
    } else {
        s.push_str(&format!("eliminate({{{}}},I)\n", lam.join(",")));
    }
    s.push_str(&ci_saturation_note("--"));
    s
}

fn m2_identifiability(g: &MixedGraph) -> String {
    let names = Names::new(g);
    let mut params = lambda_vars(g, &names, "l0");
    params.extend(omega_vars(g, &names, "w0"));
    let unknowns = lambda_vars(g, &names, "l");
    let mut s = format!("K = frac(QQ[{}]);\n", params.join(","));
    if unknowns.is_empty() {
        s.push_str("R = K[x];\n");
    } else {
        s.push_str(&format!("R = K[{}];\n", unknowns.join(",")));
    }
    s.push_str(&m2_matrix("Lambda", &lambda_rows(g, &names, "l")));
    s.push_str(&m2_matrix("Lambda0", &lambda_rows(g, &names, "l0")));
    s.push_str(&m2_matrix("W0", &omega_rows(g, &names, "w0")));
    s.push_str("S0 = sub(inverse(transpose(Lambda0))*W0*inverse(Lambda0), R);\n");
    s.push_str("W = transpose(Lambda)*S0*Lambda;\n");
    s.push_str(&format!("I = {};\n", m2_ideal(g)));
    if !g.is_acyclic() {
        s.push_str("I = saturate(I, det Lambda);\n");
    }
    s.push_str("dim I, degree I\n");
    s
}
