//! `pdf`: stationary-density grids and the exact/approximate difference
//! surface.

use rayon::prelude::*;
use rwpnet::geometry::{ConvexDomain, Point2};
use rwpnet::rwpm::{pdf_mobile_disk_approx, pdf_mobile_rect_approx};

use super::{linspace, quad_spec};
use crate::config::Experiment;
use crate::error::CliResult;
use crate::plot::{write_svg, Heatmap};
use crate::table::{Column, ResultTable};

pub fn run(exp: &Experiment) -> CliResult<()> {
    let out = std::path::Path::new(&exp.out_dir);
    let dist = exp.distribution()?;
    match exp.domain {
        ConvexDomain::Rectangle {
            half_width: a,
            half_height: b,
        } => {
            let xs = linspace(-a, a, exp.grid);
            let ys = linspace(-b, b, exp.grid);
            let cells: Vec<(f64, f64, f64, f64)> = ys
                .par_iter()
                .flat_map_iter(|&y| {
                    let dist = &dist;
                    xs.iter().map(move |&x| {
                        let p = Point2::new(x, y);
                        let f = dist.pdf(&p).expect("grid point inside domain");
                        let exact_mobile = dist
                            .with_pause_probability(0.0)
                            .expect("valid wp")
                            .mobile_pdf(&p)
                            .expect("inside");
                        let diff = pdf_mobile_rect_approx(a, b, &p) - exact_mobile;
                        (x, y, f, diff)
                    })
                })
                .collect();

            let mut table = ResultTable::new(
                "pdf_grid",
                vec![
                    Column::new("x", "length"),
                    Column::new("y", "length"),
                    Column::new("f", "1/area"),
                ],
                exp,
            );
            let mut diff_table = ResultTable::new(
                "pdf_diff",
                vec![
                    Column::new("x", "length"),
                    Column::new("y", "length"),
                    Column::new("approx_minus_exact", "1/area"),
                ],
                exp,
            );
            for &(x, y, f, d) in &cells {
                table.push_row(vec![x, y, f]);
                diff_table.push_row(vec![x, y, d]);
            }
            table.write(out, exp.format)?;
            diff_table.write(out, exp.format)?;

            if exp.plot {
                let values: Vec<f64> = cells.iter().map(|c| c.2).collect();
                let hm = Heatmap {
                    title: "stationary density".into(),
                    x_label: "x".into(),
                    y_label: "y".into(),
                    x_range: (-a, a),
                    y_range: (-b, b),
                    nx: exp.grid,
                    ny: exp.grid,
                    values,
                };
                write_svg(out, "pdf_grid", &hm.render())?;
                let values: Vec<f64> = cells.iter().map(|c| c.3).collect();
                let hm = Heatmap {
                    title: "approximate minus exact mobile density".into(),
                    x_label: "x".into(),
                    y_label: "y".into(),
                    x_range: (-a, a),
                    y_range: (-b, b),
                    nx: exp.grid,
                    ny: exp.grid,
                    values,
                };
                write_svg(out, "pdf_diff", &hm.render())?;
            }
        }
        ConvexDomain::Disk { radius } => {
            let spec = quad_spec();
            let rs = linspace(0.0, radius, exp.grid);
            let mut table = ResultTable::new(
                "pdf_radial",
                vec![
                    Column::new("r", "length"),
                    Column::new("f", "1/area"),
                    Column::new("f_mobile_approx", "1/area"),
                ],
                exp,
            );
            let _ = &spec;
            for &r in &rs {
                let p = Point2::new(r, 0.0);
                let f = dist.pdf(&p).expect("inside");
                table.push_row(vec![r, f, pdf_mobile_disk_approx(radius, r)]);
            }
            table.write(out, exp.format)?;
            if exp.plot {
                let mut chart = crate::plot::LineChart::new("radial density", "r", "f");
                chart.add(
                    format!("wp={}", exp.wp),
                    rs.iter()
                        .map(|&r| (r, dist.pdf(&Point2::new(r, 0.0)).expect("inside")))
                        .collect(),
                );
                write_svg(out, "pdf_radial", &chart.render())?;
            }
        }
    }
    Ok(())
}
