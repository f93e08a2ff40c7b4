use halftrans_web::Demo;

#[test]
fn torus_operations() {
    let mut d = Demo::new("square_torus").unwrap();
    let svg = d.connections_svg("2").unwrap();
    // On the unit square every connection up to length √2 is a single segment.
    assert_eq!(svg.matches("<line").count(), 4);
    let cyl = d.cylinders_json("1,0").unwrap();
    assert!(cyl.contains("\"periodic\""));
    assert!(d.cylinders_svg("1,0").unwrap().contains("data-cylinder=\"0\""));
    let before: Vec<String> = serde_json::from_str(&d.edges()).unwrap();
    let mut flipped = false;
    for k in 0..before.len() {
        if d.flip(k).is_ok() {
            flipped = true;
            break;
        }
    }
    assert!(flipped);
    assert_eq!(d.flip_count(), 1);
    d.reset().unwrap();
    assert_eq!(serde_json::from_str::<Vec<String>>(&d.edges()).unwrap(), before);
}

#[test]
fn bad_input_is_reported() {
    assert!(Demo::new("sphere").is_err());
    let d = Demo::new("regular_octagon").unwrap();
    assert!(d.connections_svg("-1").is_err());
    assert!(d.cylinders_svg("0,0").is_err());
    assert!(d.cylinders_svg("nonsense").is_err());
}
