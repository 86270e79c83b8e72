//! Front end for the `.mpl` modeling language: lexer, parser, static
//! checker, and canonical pretty-printer. The grammar is documented in
//! `docs/grammar.ebnf`.

pub mod ast;
pub mod lexer;
pub mod model;
pub mod parser;
pub mod pretty;

pub use model::{parse_model, ProgramModel, SlotClass, SlotId, SlotInfo, VarLayout};
pub use pretty::to_source;

#[cfg(test)]
mod tests {
    use num_bigint::BigUint;

    use super::*;

    pub(crate) const PETERSON: &str = r#"
// Peterson's mutual exclusion protocol for two processes.
bool turn;
bool flag[2];
byte ncrit;

proc user replicate 2 {
again:
    flag[_pid] = 1;
    turn = _pid;
    guard flag[1 - _pid] == 0 || turn == 1 - _pid;
    ncrit = ncrit + 1;
    assert ncrit == 1;
    ncrit = ncrit - 1;
    flag[_pid] = 0;
    goto again;
}
"#;

    #[test]
    fn peterson_parses_with_expected_variables() {
        let m = parse_model(PETERSON, "peterson2.mpl").unwrap();
        assert_eq!(m.process_count(), 2);
        let names: Vec<&str> = m.layout().slots().iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, vec!["_pc[0]", "_pc[1]", "turn", "flag[0]", "flag[1]", "ncrit"]);
        // 8 executable statements per process: pc domain is 0..=8.
        let pc = m.layout().slot(SlotId(0));
        assert_eq!((pc.lo, pc.hi), (0, 8));
    }

    #[test]
    fn peterson_state_space_size_is_domain_product() {
        let m = parse_model(PETERSON, "peterson2.mpl").unwrap();
        // Oracle: multiply the declared domain sizes directly.
        // |pc0| * |pc1| * |turn| * |flag[0]| * |flag[1]| * |ncrit|
        let expected: u64 = 9 * 9 * 2 * 2 * 2 * 256;
        assert_eq!(m.state_space_size(), BigUint::from(expected));
    }

    #[test]
    fn one_bool_one_statement_state_space() {
        // pc has entry + terminal positions: 2 * 2 = 4.
        let m = parse_model("bool b;\nproc p { b = 1; }", "t.mpl").unwrap();
        assert_eq!(m.state_space_size(), BigUint::from(4u32));
    }

    #[test]
    fn zero_user_variables_leaves_pc_product() {
        let m = parse_model("proc p { guard true; guard true; }", "t.mpl").unwrap();
        assert_eq!(m.state_space_size(), BigUint::from(3u32));
    }

    #[test]
    fn unresolved_goto_label_is_reported() {
        let err = parse_model("proc p { goto missing; }", "m.mpl").unwrap_err();
        assert!(err.message.contains("unresolved goto label `missing`"), "{err}");
        assert_eq!(err.loc.line, 1);
    }

    #[test]
    fn duplicate_declaration_is_reported() {
        let err = parse_model("bool x;\nbyte x;\nproc p { x = 1; }", "m.mpl").unwrap_err();
        assert!(err.message.contains("duplicate declaration of `x`"), "{err}");
        assert_eq!(err.loc.line, 2);
    }

    #[test]
    fn unknown_variable_is_reported() {
        let err = parse_model("proc p { y = 1; }", "m.mpl").unwrap_err();
        assert!(err.message.contains("unknown variable `y`"), "{err}");
    }

    #[test]
    fn type_mismatch_is_reported() {
        let err = parse_model(
            "bool a;\nenum { red, green } c;\nproc p { guard c == a; }",
            "m.mpl",
        )
        .unwrap_err();
        assert!(err.message.contains("incompatible types"), "{err}");
    }

    #[test]
    fn guard_must_be_boolean() {
        let err = parse_model("byte x;\nproc p { guard x + 1; }", "m.mpl").unwrap_err();
        assert!(err.message.contains("guard condition must be boolean"), "{err}");
    }

    #[test]
    fn out_of_range_init_is_reported() {
        let err = parse_model("int[0..3] x = 7;\nproc p { x = 0; }", "m.mpl").unwrap_err();
        assert!(err.message.contains("outside the domain"), "{err}");
    }

    #[test]
    fn constant_index_bounds_are_static() {
        let err = parse_model("bool f[2];\nproc p { f[2] = 1; }", "m.mpl").unwrap_err();
        assert!(err.message.contains("out of bounds"), "{err}");
    }

    #[test]
    fn empty_int_range_is_reported() {
        let err = parse_model("int[5..2] x;\nproc p { x = 5; }", "m.mpl").unwrap_err();
        assert!(err.message.contains("empty int range"), "{err}");
    }

    #[test]
    fn enum_declaration_and_defaults() {
        let m = parse_model(
            "enum { idle, busy } st;\nproc p { st = busy; guard st == idle; }",
            "t.mpl",
        )
        .unwrap();
        assert_eq!(m.decls[0].init, vec![0]);
        let slot = m.layout().lookup("st").unwrap();
        assert_eq!(m.layout().slot(slot).hi, 1);
    }

    #[test]
    fn pretty_print_round_trips_peterson() {
        let m1 = parse_model(PETERSON, "peterson2.mpl").unwrap();
        let printed = to_source(&m1);
        let m2 = parse_model(&printed, "peterson2.mpl").unwrap();
        assert_eq!(m1, m2, "reparsed model differs:\n{printed}");
    }

    #[test]
    fn pretty_print_preserves_precedence() {
        let src = "byte x;\nproc p { x = (1 + x) * 2; guard x - (x - 1) == 1; }";
        let m1 = parse_model(src, "t.mpl").unwrap();
        let m2 = parse_model(&to_source(&m1), "t.mpl").unwrap();
        assert_eq!(m1, m2);
    }
}
