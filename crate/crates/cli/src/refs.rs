//! Resolving command-line references: files, graph shortcuts and builder expressions.

use csw_core::derivation::script::{generate, replay_within};
use csw_core::free_algebra::Symbol;
use csw_core::graph::{graph_from_shortcut, parse_graph, Graph};
use csw_core::hom_verifier::{ActionFile, ActionSpec, GeneratorMap};
use csw_core::maps::{block_join, block_split, rename, wreath_coefficients, wreath_phi, wreath_psi};
use csw_core::presentations::{
    a_ut, extract_graph_relations, free_product, h_inf, s_plus, sh_inf, u_plus, wreath_s_plus, Functional, Presentation,
};
use csw_core::scalar::Q;
use std::path::Path;
use std::sync::Arc;

fn read_if_file(s: &str) -> Result<Option<String>, String> {
    let p = Path::new(s);
    if p.is_file() {
        std::fs::read_to_string(p).map(Some).map_err(|e| format!("{s}: {e}"))
    } else {
        Ok(None)
    }
}

/// Splits `name(a, b(c, d))` into `name` and its top-level arguments.
pub fn parse_call(s: &str) -> Result<(String, Vec<String>), String> {
    let s = s.trim();
    let Some(open) = s.find('(') else { return Ok((s.to_string(), vec![])) };
    if !s.ends_with(')') {
        return Err(format!("unbalanced parentheses in `{s}`"));
    }
    let inner = &s[open + 1..s.len() - 1];
    let mut args = vec![];
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(inner[start..i].trim().to_string());
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(format!("unbalanced parentheses in `{s}`"));
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced parentheses in `{s}`"));
    }
    if !inner.trim().is_empty() {
        args.push(inner[start..].trim().to_string());
    }
    Ok((s[..open].trim().to_string(), args))
}

pub fn parse_u32s(args: &[String]) -> Result<Vec<u32>, String> {
    args.iter().map(|a| a.parse::<u32>().map_err(|_| format!("expected a positive integer, got `{a}`"))).collect()
}

/// Comma-separated parameters such as `3,2`.
pub fn parse_params(s: &str) -> Result<Vec<u32>, String> {
    parse_u32s(&s.split(',').map(|x| x.trim().to_string()).collect::<Vec<_>>())
}

fn one_u32(name: &str, args: &[String]) -> Result<u32, String> {
    match parse_u32s(args)?.as_slice() {
        [n] => Ok(*n),
        _ => Err(format!("{name} takes one integer")),
    }
}

fn pair_u32(name: &str, args: &[String]) -> Result<(u32, u32), String> {
    match parse_u32s(args)?.as_slice() {
        [n, k] => Ok((*n, *k)),
        _ => Err(format!("{name} takes two integers")),
    }
}

/// A graph file or a shortcut such as `L2+L3`.
pub fn load_graph(s: &str) -> Result<Arc<Graph>, String> {
    let g = match read_if_file(s)? {
        Some(text) => parse_graph(&text),
        None => graph_from_shortcut(s),
    };
    g.map(Arc::new).map_err(|e| format!("graph `{s}`: {e}"))
}

fn functional(s: &str) -> Result<Functional, String> {
    match s {
        "tau" => Ok(Functional::Tau),
        "oplus-kms" | "oplus" => Ok(Functional::OplusKms),
        _ => Err(format!("unknown functional `{s}`, expected tau or oplus-kms")),
    }
}

/// A presentation JSON file or a builder expression.
pub fn load_presentation(s: &str) -> Result<Presentation, String> {
    if let Some(text) = read_if_file(s)? {
        // A saved report from `presentation emit` carries the presentation under `result`.
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{s}: {e}"))?;
        let body = v.get("result").filter(|_| v.get("config").is_some()).cloned().unwrap_or(v);
        let p: Presentation = serde_json::from_value(body).map_err(|e| format!("{s}: {e}"))?;
        p.validate().map_err(|e| format!("{s}: {e}"))?;
        return Ok(p);
    }
    let (name, args) = parse_call(s)?;
    let p = match name.as_str() {
        "s_plus" => s_plus(one_u32(&name, &args)?),
        "u_plus" => u_plus(one_u32(&name, &args)?),
        "h_inf" => h_inf(one_u32(&name, &args)?),
        "sh_inf" => sh_inf(one_u32(&name, &args)?),
        "a_ut" => {
            let f = args.iter().map(|a| a.parse::<Q>().map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?;
            a_ut(&f).map_err(|e| e.to_string())?
        }
        "free" => free_product(&args.iter().map(|a| load_presentation(a)).collect::<Result<Vec<_>, _>>()?),
        "wreath" => match args.as_slice() {
            [inner, k] => wreath_s_plus(&load_presentation(inner)?, one_u32("wreath", &[k.clone()])?).map_err(|e| e.to_string())?,
            _ => return Err("wreath takes a presentation and K".into()),
        },
        "extract" => {
            let (g, f, level) = match args.as_slice() {
                [g, f] => (g, f, 1),
                [g, f, l] => (g, f, one_u32("level", &[l.clone()])? as usize),
                _ => return Err("extract takes a graph, a functional and an optional level".into()),
            };
            extract_graph_relations(&load_graph(g)?, functional(f)?, level).map_err(|e| e.to_string())?
        }
        "replayed" => {
            let [thm, rest @ ..] = args.as_slice() else { return Err("replayed takes a theorem name and parameters".into()) };
            let script = generate(thm, &parse_u32s(rest)?).map_err(|e| e.to_string())?;
            let p = script.presentation().map_err(|e| e.to_string())?;
            let r = replay_within(&script, &p, script.degree).map_err(|e| e.to_string())?;
            if !r.passed() {
                return Err(format!("replay of {} did not pass", script.name));
            }
            r.extended(&p)
        }
        _ => return Err(format!("unknown presentation `{s}`")),
    };
    Ok(p)
}

/// A generator-map JSON file or a named map; `identity` needs the source presentation.
pub fn load_map(s: &str, source: &Presentation) -> Result<GeneratorMap, String> {
    if let Some(text) = read_if_file(s)? {
        return serde_json::from_str(&text).map_err(|e| format!("{s}: {e}"));
    }
    let (name, args) = parse_call(s)?;
    match name.as_str() {
        "identity" => Ok(GeneratorMap::identity(source)),
        "phi" => pair_u32(&name, &args).map(|(n, k)| wreath_phi(n, k)),
        "psi" => pair_u32(&name, &args).map(|(n, k)| wreath_psi(n, k)),
        "split" => Ok(block_split(&parse_u32s(&args)?)),
        "join" => Ok(block_join(&parse_u32s(&args)?)),
        "rename" | "transpose" => match args.as_slice() {
            [from, to] => {
                let n = source.matrix(from).ok_or_else(|| format!("source has no matrix `{from}`"))?.rows;
                Ok(rename(from, to, n, name == "transpose"))
            }
            _ => Err(format!("{name} takes the source and target matrix names")),
        },
        _ => Err(format!("unknown map `{s}`")),
    }
}

/// An action JSON file, `wreath(N,K)` on `⊔^K L_N`, or `block(n1,n2,…)` on `⊔ L_{n_i}`.
pub fn load_action(s: &str) -> Result<ActionSpec, String> {
    if let Some(text) = read_if_file(s)? {
        let f: ActionFile = serde_json::from_str(&text).map_err(|e| format!("{s}: {e}"))?;
        return ActionSpec::from_file(&f).map_err(|e| e.to_string());
    }
    let (name, args) = parse_call(s)?;
    let (graph, coefficients, preserving) = match name.as_str() {
        "wreath" => {
            let (n, k) = pair_u32(&name, &args)?;
            (vec![format!("L{n}"); k as usize].join("+"), wreath_coefficients(n, k), false)
        }
        "block" => {
            let ns = parse_u32s(&args)?;
            let split = block_split(&ns);
            let total: u32 = ns.iter().sum();
            let coef = (1..=total).map(|f| (1..=total).map(|e| split.images[&Symbol::new("q", f, e)].clone()).collect()).collect();
            (ns.iter().map(|n| format!("L{n}")).collect::<Vec<_>>().join("+"), coef, true)
        }
        _ => return Err(format!("unknown action `{s}`")),
    };
    let file = ActionFile { graph, convention: Default::default(), coefficients, component_preserving: preserving };
    ActionSpec::from_file(&file).map_err(|e| e.to_string())
}
