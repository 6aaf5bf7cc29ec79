fn main() {
    use embedcheck::domain::{catalog, raster::rasterize};
    use embedcheck::spectrum::mask_spectrum;
    use std::time::Instant;
    let domains: Vec<(&str, embedcheck::domain::Domain)> = vec![
        ("sin_component", catalog::sin_component_domain().unwrap()),
        ("spiral", catalog::spiral_domain()),
        ("rectangle_chain", catalog::rectangle_chain(1.0, 40).unwrap()),
    ];
    for (name, dom) in &domains {
        for cpu in [256usize, 512] {
            let t0 = Instant::now();
            let mask = rasterize(dom, cpu).unwrap();
            let t_rast = t0.elapsed().as_secs_f64();
            let t0 = Instant::now();
            match mask_spectrum(&mask, 6, 1e-6, 42) {
                Ok(rep) => println!(
                    "{name} cpu {cpu}: cells {} rast {:.2}s solve {:.2}s iters {} comps {} eigs {:?}",
                    mask.cell_count(), t_rast, t0.elapsed().as_secs_f64(), rep.iterations,
                    rep.component_count,
                    rep.eigenvalues.iter().map(|l| (l * 1e5).round() / 1e5).collect::<Vec<_>>()
                ),
                Err(e) => println!("{name} cpu {cpu}: cells {} ERROR {e}", mask.cell_count()),
            }
        }
    }
}
