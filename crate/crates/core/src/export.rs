//! Serializers for network matrices as weighted undirected graphs.
//!
//! Each unordered pair `{i, j}` with a nonzero entry is written once.
//! Self-loops carry the diagonal mass; leaving them out drops the part of the
//! total that the conservation rule depends on.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::model::{EntityId, NetworkMatrix};

/// Formats `x` with nine significant digits, keeping trailing zeros.
pub fn format_weight(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.8}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-30..=8).contains(&exponent) {
        return format!("{x:.8e}");
    }
    let decimals = (8 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may carry into a new leading digit (9.9999999996 -> 10.00000000)
    if significant_digits(&s) > 9 {
        return match decimals {
            0 => format!("{x:.8e}"),
            d => format!("{x:.*}", d - 1),
        };
    }
    s
}

fn significant_digits(s: &str) -> usize {
    s.chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count()
}

/// Labels for the entities of `b`: the bare id, or `level:id` when the same
/// id occurs at more than one level.
pub fn entity_labels(entities: &[EntityId]) -> Vec<String> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for e in entities {
        *counts.entry(e.id()).or_insert(0) += 1;
    }
    entities
        .iter()
        .map(|e| {
            if counts[e.id()] > 1 {
                e.to_string()
            } else {
                e.id().to_string()
            }
        })
        .collect()
}

/// Mass on the diagonal, i.e. what `include_self_loops = false` discards.
pub fn self_loop_mass(b: &NetworkMatrix) -> f64 {
    b.diagonal().iter().sum()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) || s.trim() != s {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `source,target,weight` rows for every nonzero `b_ij` with `i <= j`, in
/// entity order.
pub fn export_edgelist(b: &NetworkMatrix, include_self_loops: bool) -> String {
    let labels = entity_labels(b.entities());
    let mut out = String::from("source,target,weight\n");
    for (i, j, w) in b.upper_entries() {
        if i == j && !include_self_loops {
            continue;
        }
        let _ = writeln!(
            out,
            "{},{},{}",
            csv_field(&labels[i]),
            csv_field(&labels[j]),
            format_weight(w)
        );
    }
    out
}

/// Pajek `.net`: vertices, then strict upper triangle edges, then loops.
pub fn export_pajek(b: &NetworkMatrix, include_self_loops: bool) -> String {
    let labels = entity_labels(b.entities());
    let mut out = String::new();
    let _ = writeln!(out, "*Vertices {}", b.size());
    for (i, label) in labels.iter().enumerate() {
        let _ = writeln!(out, "{} \"{}\"", i + 1, label.replace('"', "'"));
    }
    out.push_str("*Edges\n");
    let mut loops = Vec::new();
    for (i, j, w) in b.upper_entries() {
        if i == j {
            loops.push((i, w));
        } else {
            let _ = writeln!(out, "{} {} {}", i + 1, j + 1, w);
        }
    }
    if include_self_loops {
        for (i, w) in loops {
            let _ = writeln!(out, "{} {} {}", i + 1, i + 1, w);
        }
    }
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn export_graphml(b: &NetworkMatrix, include_self_loops: bool) -> String {
    let labels: Vec<String> = entity_labels(b.entities())
        .iter()
        .map(|l| xml_escape(l))
        .collect();
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    out.push_str("  <key id=\"level\" for=\"node\" attr.name=\"level\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    let _ = writeln!(
        out,
        "  <graph id=\"G\" edgedefault=\"undirected\" parse.nodes=\"{}\">",
        b.size()
    );
    for (label, entity) in labels.iter().zip(b.entities()) {
        let _ = writeln!(
            out,
            "    <node id=\"{label}\"><data key=\"level\">{}</data></node>",
            entity.level()
        );
    }
    for (i, j, w) in b.upper_entries() {
        if i == j && !include_self_loops {
            continue;
        }
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{w}</data></edge>",
            labels[i], labels[j]
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::build_incidence;
    use crate::model::{CountingScheme, Level, PaperRecord};
    use crate::projection::project;

    fn sample_network(scheme: CountingScheme) -> NetworkMatrix {
        let recs = vec![
            PaperRecord::authors("p1", &["a1", "a2", "a3"]).unwrap(),
            PaperRecord::authors("p2", &["a1", "a3"]).unwrap(),
            PaperRecord::authors("p3", &["a2", "a4"]).unwrap(),
        ];
        project(&build_incidence(&recs, scheme).unwrap())
    }

    fn identity(n: usize) -> NetworkMatrix {
        let ents = (0..n)
            .map(|i| EntityId::author(format!("a{i}")).unwrap())
            .collect();
        let dense: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        NetworkMatrix::from_dense(ents, &dense, n).unwrap()
    }

    fn zero(n: usize) -> NetworkMatrix {
        let ents = (0..n)
            .map(|i| EntityId::author(format!("a{i}")).unwrap())
            .collect();
        NetworkMatrix::from_dense(ents, &vec![vec![0.0; n]; n], 0).unwrap()
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_weight(13.0 / 36.0), "0.361111111");
        assert_eq!(format_weight(0.25), "0.250000000");
        assert_eq!(format_weight(1.0), "1.00000000");
        assert_eq!(format_weight(17.0), "17.0000000");
        assert_eq!(format_weight(9.9999999996), "10.0000000");
        assert_eq!(format_weight(0.0123456789012), "0.0123456789");
        assert_eq!(format_weight(123456789.4), "123456789");
        assert_eq!(format_weight(1.5e12), "1.50000000e12");
    }

    #[test]
    fn edgelist_fractional() {
        let text = export_edgelist(&sample_network(CountingScheme::FractionalEqual), true);
        assert_eq!(
            text,
            "source,target,weight\n\
             a1,a1,0.361111111\n\
             a1,a2,0.111111111\n\
             a1,a3,0.361111111\n\
             a2,a2,0.361111111\n\
             a2,a3,0.111111111\n\
             a2,a4,0.250000000\n\
             a3,a3,0.361111111\n\
             a4,a4,0.250000000\n"
        );
    }

    #[test]
    fn edgelist_edge_cases() {
        assert_eq!(export_edgelist(&zero(3), true), "source,target,weight\n");
        assert_eq!(
            export_edgelist(&identity(3), false),
            "source,target,weight\n"
        );
        assert_eq!(export_edgelist(&identity(2), true).lines().count(), 3);
    }

    #[test]
    fn pajek_full() {
        let text = export_pajek(&sample_network(CountingScheme::Full), true);
        assert_eq!(
            text,
            "*Vertices 4\n1 \"a1\"\n2 \"a2\"\n3 \"a3\"\n4 \"a4\"\n*Edges\n\
             1 2 1\n1 3 2\n2 3 1\n2 4 1\n1 1 2\n2 2 2\n3 3 2\n4 4 1\n"
        );
    }

    #[test]
    fn pajek_small_cases() {
        assert_eq!(
            export_pajek(&identity(1), true),
            "*Vertices 1\n1 \"a0\"\n*Edges\n1 1 1\n"
        );
        assert_eq!(
            export_pajek(&zero(2), true),
            "*Vertices 2\n1 \"a0\"\n2 \"a1\"\n*Edges\n"
        );
    }

    #[test]
    fn graphml_counts() {
        let text = export_graphml(&sample_network(CountingScheme::FractionalEqual), true);
        assert_eq!(text.matches("<node ").count(), 4);
        assert_eq!(text.matches("<edge ").count(), 8);
        assert!(text
            .contains("<edge source=\"a2\" target=\"a4\"><data key=\"weight\">0.25</data></edge>"));

        let empty = NetworkMatrix::from_dense(vec![], &[], 0).unwrap();
        let text = export_graphml(&empty, true);
        assert_eq!(text.matches("<node ").count(), 0);
        assert_eq!(text.matches("<edge ").count(), 0);

        let text = export_graphml(&identity(3), true);
        assert_eq!(text.matches("<node ").count(), 3);
        assert_eq!(text.matches("<data key=\"weight\">1</data>").count(), 3);
    }

    #[test]
    fn graphml_escapes_ids() {
        let ents = vec![EntityId::author("R&D <lab>").unwrap()];
        let b = NetworkMatrix::from_dense(ents, &[vec![1.0]], 1).unwrap();
        assert!(export_graphml(&b, true).contains("id=\"R&amp;D &lt;lab&gt;\""));
    }

    #[test]
    fn labels_disambiguate_levels() {
        let ents = vec![
            EntityId::new("x", Level::Author).unwrap(),
            EntityId::new("x", Level::Institute).unwrap(),
            EntityId::new("y", Level::Institute).unwrap(),
        ];
        assert_eq!(entity_labels(&ents), vec!["author:x", "institute:x", "y"]);
    }

    #[test]
    fn deterministic_output() {
        let b = sample_network(CountingScheme::FractionalEqual);
        assert_eq!(export_graphml(&b, true), export_graphml(&b, true));
        assert_eq!(export_pajek(&b, true), export_pajek(&b, true));
    }
}
