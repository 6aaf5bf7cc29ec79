fn main() {
    use embedcheck::domain::{catalog, raster::rasterize};
    use embedcheck::spectrum::{DiscreteForms, MgPreconditioner};
    let mask = rasterize(&catalog::unit_cube(2).unwrap(), 64).unwrap();
    let forms = DiscreteForms::assemble(&mask).unwrap();
    let mg = MgPreconditioner::new(&forms, 1.0);
    println!("levels {} coarse {}", mg.levels(), mg.coarse_size());
    let n = forms.len();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let apply_t = |x: &[f64], y: &mut Vec<f64>| {
        let mut tmp = vec![0.0; n];
        forms.apply_stiffness(x, y);
        forms.apply_mass(x, &mut tmp);
        for i in 0..n { y[i] += tmp[i]; }
    };
    let norm = |v: &[f64]| v.iter().map(|x| x*x).sum::<f64>().sqrt();
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    println!("r0 = {}", norm(&r));
    for it in 0..12 {
        let mut z = vec![0.0; n];
        mg.apply(&r, &mut z);
        for i in 0..n { x[i] += z[i]; }
        let mut tx = vec![0.0; n];
        apply_t(&x, &mut tx);
        for i in 0..n { r[i] = b[i] - tx[i]; }
        println!("iter {it}: res {}", norm(&r));
    }
}
