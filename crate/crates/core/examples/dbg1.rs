fn main() {
    use embedcheck::domain::{catalog, raster::rasterize};
    use embedcheck::inequality::GridFunction;
    // L2 convergence probe
    let exact = 0.5;
    for cpu in [16, 32, 64, 128] {
        let mask = rasterize(&catalog::unit_cube(2).unwrap(), cpu).unwrap();
        let u = GridFunction::from_fn(&mask, |p| (std::f64::consts::PI * p[0]).cos()).unwrap();
        println!("cpu {cpu}: cells {} l2sq {} err {:e}", mask.cell_count(), u.l2_sq(), (u.l2_sq()-exact).abs());
    }
    let dom = catalog::sin_component_domain().unwrap();
    for cpu in [64, 128, 256] {
        let m = rasterize(&dom, cpu).unwrap();
        println!("sin cpu {cpu}: area {} exact {}", m.area(), 6.0/std::f64::consts::PI);
    }
    let sd = catalog::default_step_domain();
    let m = rasterize(&sd, 16).unwrap();
    println!("step mask 16: cells {} dims {:?} origin {:?}", m.cell_count(), m.grid().dims, m.grid().origin);
}
