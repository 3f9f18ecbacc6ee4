use proptest::prelude::*;
use twostep::gmmb::{GmmbParams, McConfig, ScrPrinciple};
use twostep_cli::{parse_config, render_config, RunConfig};

fn run_config() -> impl Strategy<Value = RunConfig> {
    let model = (
        (0.001f64..0.2, 0.0f64..0.01, 0.0f64..0.05, -0.02f64..0.1, 0.01f64..1.0),
        (0.5f64..40.0, 0.1f64..3.0, 0.1f64..3.0, -0.5f64..0.5),
    )
        .prop_map(|((c, xi, lambda0, r, sigma), (maturity, guarantee, y0, mu))| GmmbParams {
            c, xi, lambda0, r, sigma, rho: 0.0, maturity, guarantee, y0, mu,
        });
    let mc = (1usize..1_000_000, any::<u64>(), prop::option::of(1usize..64))
        .prop_map(|(n_paths, seed, n_threads)| McConfig { n_paths, seed, n_threads });
    let principle = prop_oneof![
        (0.0f64..5.0).prop_map(|beta| ScrPrinciple::StdDev { beta }),
        (0.01f64..0.999).prop_map(|level| ScrPrinciple::Tvar { level }),
    ];
    let grid = prop::collection::vec(-1.0f64..=1.0, 1..30);
    let out = prop::option::of("[a-z][a-z0-9_/.]{0,20}");
    (model, mc, principle, 0.0f64..0.5, grid, out).prop_map(
        |(model, mc, scr_principle, coc_rate, rho_grid, output_path)| RunConfig {
            model, mc, scr_principle, coc_rate, rho_grid, output_path,
        },
    )
}

proptest! {
    #[test]
    fn parse_inverts_render(cfg in run_config()) {
        let text = render_config(&cfg);
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}
