//! Text formats for point clouds and distance tables.
//!
//! Point clouds are CSV with one point per line. A header row is optional;
//! when its first column is `label`, every data row starts with a label.
//! Without a header, a first column that does not parse as a number is
//! taken to be a label. Blank lines and lines starting with `#` are ignored.
//!
//! Distance tables start with the point count `n`, followed by the lower
//! triangle in row-major order as whitespace-separated decimals, either
//! strictly below the diagonal (`n(n-1)/2` values) or including the zero
//! diagonal (`n(n+1)/2` values).

use super::{MetricError, MetricKind, MetricSpace, Result};

/// A parsed point cloud prior to metric construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub labels: Vec<String>,
    pub points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn into_space(self, kind: MetricKind, dedup: bool) -> Result<MetricSpace> {
        MetricSpace::from_labeled_points(self.labels, &self.points, kind, dedup)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> MetricError {
    MetricError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_points_csv(text: &str) -> Result<PointCloud> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();

    let mut labeled = None;
    if let Some(&(_, first)) = rows.peek() {
        let fields: Vec<&str> = first.split(',').map(str::trim).collect();
        let numeric = |f: &&str| f.parse::<f64>().is_ok();
        let data_row =
            fields.iter().all(numeric) || (fields.len() > 1 && fields[1..].iter().all(numeric));
        if fields[0] == "label" || !data_row {
            labeled = Some(fields[0] == "label");
            rows.next();
        }
    }

    let mut cloud = PointCloud {
        labels: Vec::new(),
        points: Vec::new(),
    };
    for (line, text) in rows {
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        let with_label = *labeled.get_or_insert_with(|| fields[0].parse::<f64>().is_err());
        let (label, coords) = if with_label {
            (fields[0].to_string(), &fields[1..])
        } else {
            (cloud.points.len().to_string(), &fields[..])
        };
        let point = coords
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(line, format!("bad coordinate `{f}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        cloud.labels.push(label);
        cloud.points.push(point);
    }
    if cloud.points.is_empty() {
        return Err(parse_err(0, "no points"));
    }
    Ok(cloud)
}

pub fn parse_distance_matrix(text: &str) -> Result<MetricSpace> {
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
    let (line, head) = tokens
        .next()
        .ok_or_else(|| parse_err(0, "empty distance table"))?;
    let n: usize = head
        .parse()
        .map_err(|_| parse_err(line, format!("bad point count `{head}`")))?;
    let values = tokens
        .map(|(line, t)| {
            t.parse::<f64>()
                .map_err(|_| parse_err(line, format!("bad distance `{t}`")))
        })
        .collect::<Result<Vec<f64>>>()?;

    let strict = n * n.saturating_sub(1) / 2;
    let with_diagonal = n * (n + 1) / 2;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n.saturating_sub(1));
    if values.len() == strict {
        let mut it = values.into_iter();
        for i in 1..n {
            rows.push(it.by_ref().take(i).collect());
        }
    } else if values.len() == with_diagonal {
        let mut it = values.into_iter();
        for i in 0..n {
            let mut row: Vec<f64> = it.by_ref().take(i + 1).collect();
            if row.pop() != Some(0.0) {
                return Err(parse_err(
                    0,
                    format!("diagonal entry of row {i} is not zero"),
                ));
            }
            if i > 0 {
                rows.push(row);
            }
        }
    } else {
        return Err(parse_err(
            0,
            format!(
                "expected {strict} or {with_diagonal} distances for {n} points, found {}",
                values.len()
            ),
        ));
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    MetricSpace::from_lower_triangle_labeled(labels, &rows)
}
