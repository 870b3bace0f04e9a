use ccch_cli::config::{FieldSpec, SimulateConfig};
use ccch_cli::{parse_config, Command, ConfigError, RunConfig};

#[test]
fn peakon_example_parses() {
    let cfg = parse_config(
        r#"{"command":"peakon","c":1.0,"p":1,"q":1,"a":2,"b":2,"t_final":1.0}"#,
        None,
    )
    .unwrap();
    let RunConfig::Peakon(c) = &cfg else {
        panic!("{cfg:?}")
    };
    assert_eq!((c.p, c.q, c.a, c.b, c.c), (1, 1, 2.0, 2.0, Some(1.0)));
    assert_eq!(c.dt, 1e-3);
}

#[test]
fn simulate_defaults_are_filled() {
    let cfg = parse_config(r#"{"p":2,"q":3,"a":1,"b":1,"t_final":0.5}"#, Some(Command::Simulate)).unwrap();
    let RunConfig::Simulate(c) = cfg else { panic!() };
    let SimulateConfig { n, length, dt, cfl, dealias_degree, .. } = c;
    assert_eq!((n, dt, cfl, dealias_degree), (1024, 1e-3, 0.5, Some(4)));
    assert!((length - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(c.initial, FieldSpec::Random { modes: 8, amplitude: 0.5 });
}

#[test]
fn zero_exponent_is_rejected() {
    let err = parse_config(r#"{"command":"simulate","p":0,"q":1,"a":1,"b":1,"t_final":1}"#, None).unwrap_err();
    assert!(err.to_string().contains("p must be ≥ 1"), "{err}");
}

#[test]
fn duplicate_key_is_named() {
    let err = parse_config(r#"{"command":"peakon","c":1,"c":2,"p":1,"q":1,"a":2,"b":2,"t_final":1}"#, None)
        .unwrap_err();
    assert!(matches!(err, ConfigError::Syntax(_)));
    assert!(err.to_string().contains("duplicate key `c`"), "{err}");
    let nested = r#"{"command":"simulate","p":1,"q":1,"a":1,"b":1,"t_final":1,
        "initial":{"kind":"random","modes":4,"modes":5}}"#;
    assert!(parse_config(nested, None).unwrap_err().to_string().contains("duplicate key `modes`"));
}

#[test]
fn unknown_key_reports_its_path() {
    let err = parse_config(r#"{"command":"peakon","c":1,"p":1,"q":1,"a":2,"b":2,"t_final":1,"speed":3}"#, None)
        .unwrap_err();
    assert!(err.to_string().contains("unknown field `speed`"), "{err}");
    let nested = r#"{"command":"simulate","p":1,"q":1,"a":1,"b":1,"t_final":1,
        "initial":{"kind":"random","width":4}}"#;
    let err = parse_config(nested, None).unwrap_err();
    assert!(err.to_string().contains("initial") && err.to_string().contains("width"), "{err}");
}

#[test]
fn type_mismatch_reports_its_path() {
    let err = parse_config(r#"{"command":"simulate","p":1,"q":1,"a":"x","b":1,"t_final":1}"#, None).unwrap_err();
    match err {
        ConfigError::Field { path, .. } => assert_eq!(path, "a"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn constraint_violations_are_rejected() {
    for (text, needle) in [
        (r#"{"command":"exp-nonuniform","delta":1.5}"#, "delta"),
        (r#"{"command":"simulate","p":1,"q":1,"a":1,"b":1,"t_final":1,"n":100}"#, "n"),
        (r#"{"command":"simulate","p":1,"q":1,"a":1,"b":1,"t_final":-1}"#, "t_final"),
        (r#"{"command":"peakon","p":1,"q":1,"a":1,"b":1,"t_final":1}"#, "c"),
        (r#"{"command":"exp-hoelder","s":2.0,"r":1.0}"#, "Hoelder"),
    ] {
        let err = parse_config(text, None).unwrap_err().to_string();
        assert!(err.contains(needle), "{text}: {err}");
    }
}

#[test]
fn command_must_match() {
    let text = r#"{"command":"peakon","c":1,"p":1,"q":1,"a":2,"b":2,"t_final":1}"#;
    assert!(parse_config(text, Some(Command::Simulate)).is_err());
    assert!(parse_config(text, Some(Command::Peakon)).is_ok());
    assert!(parse_config(r#"{"p":1}"#, None).is_err());
    assert!(parse_config("[1, 2]", Some(Command::Norms)).is_err());
    assert!(parse_config("{", Some(Command::Norms)).is_err());
}

#[test]
fn echo_round_trips() {
    for text in [
        r#"{"command":"simulate","p":1,"q":2,"a":2,"b":1,"t_final":1,"initial":{"kind":"fourier","u":[[1,0.5,0]]}}"#,
        r#"{"command":"peakon","c":1,"p":1,"q":1,"a":2,"b":2,"t_final":1,"domain":"circle"}"#,
        r#"{"command":"norms","field":{"kind":"peakon"},"norms":[{"kind":"besov","s":1.5,"r":null},{"kind":"lebesgue","p":3}]}"#,
        r#"{"command":"exp-nonuniform","lambdas":[16,32]}"#,
        r#"{"command":"exp-hoelder"}"#,
        r#"{"command":"exp-conservation","seed":4}"#,
        r#"{"command":"check-peakon","c":1,"p":1,"q":1,"a":2,"b":2,"amplitude_scale":2}"#,
    ] {
        let cfg = parse_config(text, None).unwrap();
        let echo = serde_json::to_string(&cfg.echo()).unwrap();
        let again = parse_config(&echo, None).unwrap();
        assert_eq!(cfg, again, "{text}");
    }
}

#[test]
fn seed_override() {
    let mut cfg = parse_config(r#"{"command":"exp-hoelder","seed":3}"#, None).unwrap();
    assert_eq!(cfg.seed(), Some(3));
    cfg.set_seed(11);
    assert_eq!(cfg.seed(), Some(11));
    let mut p = parse_config(r#"{"command":"peakon","c":1,"p":1,"q":1,"a":2,"b":2,"t_final":1}"#, None).unwrap();
    p.set_seed(5);
    assert_eq!(p.seed(), None);
}
