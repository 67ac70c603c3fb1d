use std::fmt;

use serde::{Deserialize, Serialize};

use super::battery::{BATTERY_NEW_COLORS, BATTERY_TEST_COLORS};
use super::session::Session;
use crate::color::{label, Rgb};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCell {
    pub c_ot: Rgb,
    pub c_n: Rgb,
    pub s1_total: f64,
    pub s2_total: f64,
    pub completed: u32,
}

/// Summed S1/S2 scores per `(test color, new color)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub cells: Vec<ScoreCell>,
}

impl ScoreTable {
    /// All battery cells at zero.
    pub fn empty() -> Self {
        let cells = BATTERY_TEST_COLORS
            .iter()
            .flat_map(|&c_ot| {
                BATTERY_NEW_COLORS.iter().map(move |&c_n| ScoreCell {
                    c_ot,
                    c_n,
                    s1_total: 0.0,
                    s2_total: 0.0,
                    completed: 0,
                })
            })
            .collect();
        ScoreTable { cells }
    }

    pub fn cell(&self, c_ot: Rgb, c_n: Rgb) -> Option<&ScoreCell> {
        self.cells.iter().find(|c| c.c_ot == c_ot && c.c_n == c_n)
    }

    fn cell_mut(&mut self, c_ot: Rgb, c_n: Rgb) -> &mut ScoreCell {
        let idx = match self.cells.iter().position(|c| c.c_ot == c_ot && c.c_n == c_n) {
            Some(i) => i,
            None => {
                self.cells.push(ScoreCell {
                    c_ot,
                    c_n,
                    s1_total: 0.0,
                    s2_total: 0.0,
                    completed: 0,
                });
                self.cells.len() - 1
            }
        };
        &mut self.cells[idx]
    }

    pub fn add_session(&mut self, session: &Session) {
        for trial in &session.trials {
            if let Some(o) = trial.outcome() {
                let s = trial.spec.stimulus;
                let cell = self.cell_mut(s.c_ot, s.c_n);
                cell.s1_total += o.s1_score;
                cell.s2_total += o.s2_score;
                cell.completed += 1;
            }
        }
    }
}

pub fn aggregate_scores<'a>(sessions: impl IntoIterator<Item = &'a Session>) -> ScoreTable {
    let mut table = ScoreTable::empty();
    for s in sessions {
        table.add_session(s);
    }
    table
}

impl fmt::Display for ScoreTable {
    /// One row per test color, one column per new color, each cell `S1/S2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rows: Vec<Rgb> = Vec::new();
        let mut cols: Vec<Rgb> = Vec::new();
        for c in &self.cells {
            if !rows.contains(&c.c_ot) {
                rows.push(c.c_ot);
            }
            if !cols.contains(&c.c_n) {
                cols.push(c.c_n);
            }
        }
        write!(f, "{:<10}", "test\\new")?;
        for c in &cols {
            write!(f, " {:>13}", label(*c))?;
        }
        writeln!(f)?;
        for r in &rows {
            write!(f, "{:<10}", label(*r))?;
            for c in &cols {
                match self.cell(*r, *c) {
                    Some(cell) => write!(f, " {:>13}", format!("{}/{}", cell.s1_total, cell.s2_total))?,
                    None => write!(f, " {:>13}", "-")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::session::{Choice, Command, SessionConfig};
    use crate::model::BaselineScheme;

    fn completed_session(seed: u64, pick: impl Fn(usize) -> Choice) -> Session {
        let (mut s, _) = Session::create(&SessionConfig::new(BaselineScheme::Group2, seed), 0).unwrap();
        for i in 0..15 {
            s.execute(i, Command::Start, 0).unwrap();
            s.execute(i, Command::Choose(pick(i as usize)), 20_000).unwrap();
        }
        s
    }

    #[test]
    fn empty_table_is_all_zero() {
        let t = aggregate_scores(std::iter::empty());
        assert_eq!(t.cells.len(), 15);
        assert!(t.cells.iter().all(|c| c.s1_total == 0.0 && c.s2_total == 0.0 && c.completed == 0));
    }

    #[test]
    fn all_s2_gives_fifteens() {
        let sessions: Vec<Session> = (0..15).map(|k| completed_session(k, |_| Choice::PickedS2)).collect();
        let t = aggregate_scores(&sessions);
        for c in &t.cells {
            assert_eq!((c.s1_total, c.s2_total, c.completed), (0.0, 15.0, 15));
        }
    }

    #[test]
    fn one_almost_same() {
        let mut sessions: Vec<Session> =
            (0..14).map(|k| completed_session(k, |_| Choice::PickedS2)).collect();
        sessions.push(completed_session(99, |i| if i == 0 { Choice::AlmostSame } else { Choice::PickedS2 }));
        let t = aggregate_scores(&sessions);
        let cell = t.cell(Rgb::RED, Rgb::WHITE).unwrap();
        assert_eq!((cell.s1_total, cell.s2_total), (0.5, 14.5));
        for c in &t.cells {
            assert_eq!(c.s1_total + c.s2_total, c.completed as f64);
        }
    }

    #[test]
    fn text_layout() {
        let sessions = [completed_session(1, |_| Choice::PickedS2)];
        let text = aggregate_scores(&sessions).to_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].contains("white") && lines[0].contains("black"));
        assert!(lines[1].starts_with("red"));
        assert_eq!(lines[1].matches("0/1").count(), 5);
    }
}
