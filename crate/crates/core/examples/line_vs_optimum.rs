use kchase::line_chaser::chase_step;
use kchase::oracles::{breakpoint_grid, chasing_opt_line};
use kchase::{Configuration, Line, LineRequest};

fn main() -> kchase::Result<()> {
    let x0 = Configuration::new(&Line, vec![-1.0, 4.0])?;
    let requests = vec![
        LineRequest::power(2.0, 1.0, 1.0)?,
        LineRequest::power(-3.0, 2.0, 0.5)?,
    ];

    let mut x = x0.clone();
    let mut online = 0.0;
    for f in &requests {
        let step = chase_step(&x, f)?;
        online += step.service + step.movement;
        x = step.post;
    }
    let offline = chasing_opt_line(&requests, &x0, &breakpoint_grid(&requests, &x0))?.value;
    println!("online {online}, offline {offline}");
    Ok(())
}
