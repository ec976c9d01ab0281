//! Rendering of discovered property assertions: JSON lines for tooling and
//! ASP-style `prop(...)` facts for interop with ASP-based learners.

use std::io::{self, Write};

use disco_core::{FactStore, PropertyAssertion};
use serde::Serialize;

#[derive(Serialize)]
struct AssertionRow<'a> {
    property: &'a str,
    relations: Vec<&'a str>,
    arity: usize,
    detail: String,
}

fn relation_names<'a>(a: &PropertyAssertion, store: &'a FactStore) -> Vec<&'a str> {
    a.relations.iter().map(|&(s, _)| store.symbols().name(s)).collect()
}

/// One JSON object per assertion, one per line.
pub fn write_json(
    assertions: &[PropertyAssertion],
    store: &FactStore,
    out: &mut dyn Write,
) -> io::Result<()> {
    for a in assertions {
        let row = AssertionRow {
            property: a.kind.family(),
            relations: relation_names(a, store),
            arity: a.relations.first().map_or(0, |&(_, n)| n),
            detail: a.kind.detail(),
        };
        serde_json::to_writer(&mut *out, &row)?;
        writeln!(out)?;
    }
    Ok(())
}

/// `prop(asymmetric_ab_ba,mother).` lines; exclusive pairs carry both
/// relations: `prop(unsat_pair,even,odd).`.
pub fn write_asp(
    assertions: &[PropertyAssertion],
    store: &FactStore,
    out: &mut dyn Write,
) -> io::Result<()> {
    for a in assertions {
        writeln!(out, "prop({},{}).", a.kind.asp_name(), relation_names(a, store).join(","))?;
    }
    Ok(())
}
