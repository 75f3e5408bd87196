use crate::hierarchy::{EntityCode, Id, TBoxEncoding};

use super::MaterializeError;

/// Most specific concepts of `candidates`: the members no other candidate is
/// subsumed by.
///
/// Candidates are scanned once in descending code order. A subconcept
/// always has a larger value than its tree ancestors, so a candidate is
/// redundant exactly when an already kept member lies in its interval. DAG
/// hierarchies can also place a descendant below its residual ancestor's
/// value; such a late candidate evicts the members it is subsumed by.
///
/// The result is sorted ascending.
pub fn msc(candidates: &[Id], tbox: &TBoxEncoding) -> Result<Vec<Id>, MaterializeError> {
    let table = tbox.concepts();
    let mut sorted: Vec<(Id, EntityCode)> = candidates
        .iter()
        .map(|&c| {
            table
                .code_by_value(c)
                .map(|code| (c, *code))
                .ok_or(MaterializeError::UnknownConcept(c))
        })
        .collect::<Result<_, _>>()?;
    sorted.sort_unstable_by_key(|c| std::cmp::Reverse(c.0));
    sorted.dedup_by_key(|c| c.0);

    let mut kept: Vec<(Id, EntityCode)> = Vec::with_capacity(sorted.len().min(4));
    let dag = !table.residual_pairs().is_empty();
    for (x, code) in sorted {
        if kept.iter().any(|(m, _)| table.is_descendant_or_self(*m, &code)) {
            continue;
        }
        if dag {
            kept.retain(|(_, m_code)| !table.is_descendant_or_self(x, m_code));
        }
        kept.push((x, code));
    }
    let mut out: Vec<Id> = kept.into_iter().map(|(m, _)| m).collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::TBoxBuilder;
    use crate::rdf::SchemaAxiom;

    fn tbox(axioms: Vec<SchemaAxiom>) -> TBoxEncoding {
        TBoxBuilder::new(axioms).build().unwrap()
    }

    fn id(t: &TBoxEncoding, iri: &str) -> Id {
        t.concepts().code_of(iri).unwrap().value
    }

    #[test]
    fn keeps_the_more_specific() {
        let t = tbox(vec![
            SchemaAxiom::sub_class("B", "A"),
            SchemaAxiom::sub_class("C", "A"),
        ]);
        let (a, b, c) = (id(&t, "A"), id(&t, "B"), id(&t, "C"));
        assert_eq!(msc(&[a, b], &t).unwrap(), vec![b]);
        assert_eq!(msc(&[b], &t).unwrap(), vec![b]);
        assert_eq!(msc(&[a, b, c, b], &t).unwrap(), vec![b, c]);
        assert!(msc(&[], &t).unwrap().is_empty());
    }

    #[test]
    fn root_is_subsumed_by_everything() {
        let t = tbox(vec![SchemaAxiom::sub_class("B", "A")]);
        assert_eq!(msc(&[0, id(&t, "A")], &t).unwrap(), vec![id(&t, "A")]);
        assert_eq!(msc(&[0], &t).unwrap(), vec![0]);
    }

    #[test]
    fn residual_ancestor_is_dropped() {
        // D hangs under B in the tree, so its value is below C's even
        // though D is subsumed by C.
        let t = tbox(vec![
            SchemaAxiom::sub_class("B", "A"),
            SchemaAxiom::sub_class("C", "A"),
            SchemaAxiom::sub_class("D", "B"),
            SchemaAxiom::sub_class("D", "C"),
            SchemaAxiom::sub_class("E", "C"),
        ]);
        let (b, c, d, e) = (id(&t, "B"), id(&t, "C"), id(&t, "D"), id(&t, "E"));
        assert!(t.concepts().residual_pairs().contains(&(d, c)));
        assert!(d < c);
        assert_eq!(msc(&[c, d], &t).unwrap(), vec![d]);
        assert_eq!(msc(&[b, c, d, e], &t).unwrap(), {
            let mut v = vec![d, e];
            v.sort();
            v
        });
    }

    #[test]
    fn unknown_concept() {
        let t = tbox(vec![SchemaAxiom::sub_class("B", "A")]);
        assert!(matches!(msc(&[12345], &t), Err(MaterializeError::UnknownConcept(12345))));
    }
}
