//! Synthetic floor plans, hierarchies and random instances used by the
//! bundled fixtures, tests and benchmarks.

use crate::floorplan::{FloorPlan, Seat, SeatKind};
use crate::geometry::{Point, Polygon};
use crate::hierarchy::{Hierarchy, TeamEntry};
use crate::model::{SaProblem, SaSeat, Team};
use crate::rng::{derive_seed, rng_from_seed};
use rand::seq::SliceRandom;
use rand::Rng as _;

fn desk(id: String, x: f64, y: f64) -> Seat {
    Seat {
        id,
        kind: SeatKind::Desk,
        pos: Point::new(x, y),
    }
}

fn office(id: String, x: f64, y: f64) -> Seat {
    Seat {
        id,
        kind: SeatKind::Office,
        pos: Point::new(x, y),
    }
}

fn entry(id: &str, parent: Option<&str>, desks: usize, offices: usize) -> TeamEntry {
    TeamEntry {
        id: id.to_string(),
        parent: parent.map(str::to_string),
        desks: Some(desks),
        offices: Some(offices),
    }
}

fn branch(id: &str, parent: Option<&str>) -> TeamEntry {
    TeamEntry {
        id: id.to_string(),
        parent: parent.map(str::to_string),
        desks: None,
        offices: None,
    }
}

/// 120×80 open-plan floor: a lower zone split by a wall open at the bottom,
/// an upper zone behind a wall with two openings, and six single offices
/// with doors along the top left. 106 desks, 6 offices.
pub fn office_floor() -> FloorPlan {
    let mut obstacles = vec![
        Polygon::rect(0.0, 44.5, 34.0, 45.5),
        Polygon::rect(42.0, 44.5, 104.0, 45.5),
        Polygon::rect(79.5, 8.0, 80.5, 44.5),
    ];
    for k in 1..=6 {
        let x = 6.0 * k as f64;
        obstacles.push(Polygon::rect(x - 0.25, 64.0, x + 0.25, 80.0));
    }
    for k in 0..6 {
        let x = 6.0 * k as f64;
        obstacles.push(Polygon::rect(x, 63.5, x + 2.0, 64.0));
    }
    let mut seats = Vec::new();
    for j in 0..4 {
        for i in 0..12 {
            seats.push(desk(format!("L{j}{i:02}"), 6.0 + 6.0 * i as f64, 8.0 + 9.0 * j as f64));
        }
        for i in 0..4 {
            seats.push(desk(format!("R{j}{i:02}"), 88.0 + 8.0 * i as f64, 8.0 + 9.0 * j as f64));
        }
    }
    for (j, y) in [51.0, 57.0].into_iter().enumerate() {
        for i in 0..21 {
            seats.push(desk(format!("U{j}{i:02}"), 6.0 + 5.4 * i as f64, y));
        }
    }
    for k in 0..6 {
        seats.push(office(format!("O{k}"), 6.0 * k as f64 + 3.9, 66.5));
    }
    FloorPlan::new(120.0, 80.0, obstacles, seats).expect("office floor is valid")
}

/// Company A with Sales, Engineering and Marketing: 103 desks and 6 offices
/// over six leaf teams, three levels.
pub fn company_hierarchy() -> Hierarchy {
    Hierarchy::new(&[
        branch("Company A", None),
        branch("Sales", Some("Company A")),
        branch("Engineering", Some("Company A")),
        branch("Marketing", Some("Company A")),
        entry("EU Sales", Some("Sales"), 18, 1),
        entry("US Sales", Some("Sales"), 18, 1),
        entry("Sales Engineering", Some("Sales"), 12, 1),
        entry("R&D Engineering", Some("Engineering"), 30, 2),
        entry("Ads", Some("Marketing"), 14, 1),
        entry("Digital", Some("Marketing"), 11, 0),
    ])
    .expect("company hierarchy is valid")
}

/// 40×40 room cut into four quadrants by wall arms that leave a central
/// opening. Quadrants hold 11, 11, 10 and 10 desks, many of them close to a
/// wall so that straight-line distance understates walking distance.
pub fn walled_quadrants() -> FloorPlan {
    let obstacles = vec![
        Polygon::rect(19.5, 0.0, 20.5, 16.0),
        Polygon::rect(19.5, 24.0, 20.5, 40.0),
        Polygon::rect(0.0, 19.5, 16.0, 20.5),
        Polygon::rect(24.0, 19.5, 40.0, 20.5),
    ];
    let left = [3.0, 7.0, 11.0, 15.0];
    let right = [25.0, 29.0, 33.0, 37.0];
    let low = [4.0, 9.0, 14.0];
    let high = [26.0, 31.0, 36.0];
    let mut seats = Vec::new();
    let quads = [(0, &left, &low, 11), (1, &right, &low, 11), (2, &left, &high, 10), (3, &right, &high, 10)];
    for (q, xs, ys, count) in quads {
        let mut n = 0;
        for &y in ys.iter() {
            for &x in xs.iter() {
                if n < count {
                    seats.push(desk(format!("q{q}-{n:02}"), x, y));
                    n += 1;
                }
            }
        }
    }
    FloorPlan::new(40.0, 40.0, obstacles, seats).expect("quadrant plan is valid")
}

/// Quadrant (0..4) of a point in [`walled_quadrants`].
pub fn quadrant(p: Point) -> usize {
    (p.x > 20.0) as usize + 2 * (p.y > 20.0) as usize
}

/// Four flat teams of 14, 14, 7 and 7 desks for [`walled_quadrants`].
pub fn quadrant_teams() -> Hierarchy {
    Hierarchy::new(&[
        entry("team-a", None, 14, 0),
        entry("team-b", None, 14, 0),
        entry("team-c", None, 7, 0),
        entry("team-d", None, 7, 0),
    ])
    .expect("quadrant teams are valid")
}

/// 200×120 floor with 172 desks in three open areas and 26 single offices
/// in two rows of rooms.
pub fn medium_floor() -> FloorPlan {
    let mut obstacles = vec![
        Polygon::rect(99.5, 0.0, 100.5, 70.0),
        Polygon::rect(0.0, 50.0, 60.0, 51.0),
    ];
    let mut seats = Vec::new();
    for k in 0..13 {
        let x = 8.0 * k as f64;
        obstacles.push(Polygon::rect(x + 7.75, 100.0, x + 8.25, 120.0));
        obstacles.push(Polygon::rect(x, 99.5, x + 4.0, 100.0));
        seats.push(office(format!("OT{k:02}"), x + 5.5, 102.5));
    }
    for k in 0..13 {
        let y = 8.0 * k as f64;
        obstacles.push(Polygon::rect(180.0, y + 7.75, 200.0, y + 8.25));
        obstacles.push(Polygon::rect(179.5, y, 180.0, y + 4.0));
        seats.push(office(format!("OR{k:02}"), 182.5, y + 5.5));
    }
    for j in 0..8 {
        for i in 0..10 {
            seats.push(desk(format!("A{j}{i}"), 8.0 + 9.0 * i as f64, 10.0 + 9.0 * j as f64));
        }
    }
    for j in 0..10 {
        for i in 0..8 {
            seats.push(desk(format!("B{j}{i}"), 108.0 + 8.0 * i as f64, 8.0 + 8.5 * j as f64));
        }
    }
    for i in 0..12 {
        seats.push(desk(format!("C{i:02}"), 10.0 + 7.0 * i as f64, 88.0));
    }
    FloorPlan::new(200.0, 120.0, obstacles, seats).expect("medium floor is valid")
}

/// Five-level organization needing 167 desks and 12 offices.
pub fn medium_hierarchy() -> Hierarchy {
    Hierarchy::new(&[
        branch("Org", None),
        branch("Ops", Some("Org")),
        branch("Product", Some("Org")),
        branch("Research", Some("Org")),
        branch("Finance", Some("Ops")),
        branch("People", Some("Ops")),
        branch("Design", Some("Product")),
        branch("Platform", Some("Product")),
        branch("Lab", Some("Research")),
        entry("Accounts", Some("Finance"), 12, 1),
        entry("Audit", Some("Finance"), 8, 1),
        entry("Hiring", Some("People"), 10, 1),
        entry("UX", Some("Design"), 14, 1),
        entry("Brand", Some("Design"), 9, 0),
        branch("Core", Some("Platform")),
        entry("Infra", Some("Platform"), 15, 1),
        entry("Data", Some("Platform"), 16, 1),
        branch("Vision", Some("Lab")),
        entry("Robotics", Some("Lab"), 37, 2),
        entry("Core API", Some("Core"), 13, 1),
        entry("Core DB", Some("Core"), 11, 1),
        entry("Vision A", Some("Vision"), 12, 1),
        entry("Vision B", Some("Vision"), 10, 1),
    ])
    .expect("medium hierarchy is valid")
}

/// Three levels, two branches of four leaves each (155 desks, 10 offices).
pub fn eight_leaf_hierarchy() -> Hierarchy {
    let leaves = [(20, 1), (18, 2), (22, 1), (16, 1), (24, 2), (15, 1), (21, 1), (19, 1)];
    let mut entries = vec![branch("R", None), branch("B1", Some("R")), branch("B2", Some("R"))];
    for (i, &(d, o)) in leaves.iter().enumerate() {
        let parent = if i < 4 { "B1" } else { "B2" };
        entries.push(entry(&format!("L{}", i + 1), Some(parent), d, o));
    }
    Hierarchy::new(&entries).expect("eight-leaf hierarchy is valid")
}

/// Two open seats and one seat inside a closed room.
pub fn sealed_room() -> FloorPlan {
    let obstacles = vec![
        Polygon::rect(10.0, 10.0, 20.0, 11.0),
        Polygon::rect(10.0, 19.0, 20.0, 20.0),
        Polygon::rect(10.0, 11.0, 11.0, 19.0),
        Polygon::rect(19.0, 11.0, 20.0, 19.0),
    ];
    let seats = vec![
        desk("open-1".into(), 3.0, 3.0),
        desk("open-2".into(), 27.0, 27.0),
        desk("sealed".into(), 15.0, 15.0),
    ];
    FloorPlan::new(30.0, 30.0, obstacles, seats).expect("sealed room plan is valid")
}

fn euclidean_problem(points: &[(SaSeat, Point)], teams: Vec<Team>) -> SaProblem {
    let n = points.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = points[i].1.distance(points[j].1);
        }
    }
    let seats = points.iter().map(|(s, _)| s.clone()).collect();
    SaProblem::new(seats, teams, dist).expect("generated instance is valid")
}

/// Splits `total` into `parts` non-negative counts.
fn split(rng: &mut impl rand::Rng, total: usize, parts: usize) -> Vec<usize> {
    let mut out = vec![0; parts];
    for _ in 0..total {
        out[rng.gen_range(0..parts)] += 1;
    }
    out
}

/// A random instance with 3–10 seats (roughly a third offices), 1–3 teams
/// and Euclidean distances between points in a 10×10 square.
pub fn tiny_instance(seed: u64) -> SaProblem {
    let mut rng = rng_from_seed(derive_seed(seed, "tiny"));
    loop {
        let n = rng.gen_range(3..=10);
        let points: Vec<(SaSeat, Point)> = (0..n)
            .map(|i| {
                let kind = if rng.gen_bool(0.3) { SeatKind::Office } else { SeatKind::Desk };
                let p = Point::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
                (SaSeat { id: format!("s{i:02}"), kind }, p)
            })
            .collect();
        let n_desk = points.iter().filter(|(s, _)| s.kind == SeatKind::Desk).count();
        let n_office = n - n_desk;
        let n_teams = rng.gen_range(1..=3);
        let d = rng.gen_range(0..=n_desk);
        let o = rng.gen_range(0..=n_office);
        let ds = split(&mut rng, d, n_teams);
        let os = split(&mut rng, o, n_teams);
        if (0..n_teams).any(|t| ds[t] + os[t] == 0) {
            continue;
        }
        let teams = (0..n_teams).map(|t| Team::new(format!("t{t}"), ds[t], os[t])).collect();
        return euclidean_problem(&points, teams);
    }
}

/// A random instance shaped like a small real floor: 165–175 desks and
/// 24–28 offices scattered over 200×120, 6–10 teams needing about 95% of
/// the desks and about 12 offices. Euclidean distances.
pub fn medium_instance(seed: u64) -> SaProblem {
    let mut rng = rng_from_seed(derive_seed(seed, "medium"));
    let n_desk = rng.gen_range(165..=175);
    let n_office = rng.gen_range(24..=28);
    let mut points = Vec::with_capacity(n_desk + n_office);
    for i in 0..n_desk + n_office {
        let kind = if i < n_desk { SeatKind::Desk } else { SeatKind::Office };
        let p = Point::new(rng.gen_range(0.0..200.0), rng.gen_range(0.0..120.0));
        points.push((SaSeat { id: format!("s{i:03}"), kind }, p));
    }
    let n_teams = rng.gen_range(6..=10);
    let desks = n_desk * 95 / 100;
    let offices = rng.gen_range(10..=14);
    let mut ds = split(&mut rng, desks - n_teams, n_teams);
    for d in &mut ds {
        *d += 1;
    }
    let os = split(&mut rng, offices, n_teams);
    let mut teams: Vec<Team> = (0..n_teams).map(|t| Team::new(format!("t{t:02}"), ds[t], os[t])).collect();
    teams.shuffle(&mut rng);
    euclidean_problem(&points, teams)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn office_floor_counts() {
        let p = office_floor();
        assert_eq!(p.count_kind(SeatKind::Desk), 106);
        assert_eq!(p.count_kind(SeatKind::Office), 6);
        let h = company_hierarchy();
        let root = h.team(h.index_of("Company A").unwrap());
        assert_eq!((root.desks, root.offices), (103, 6));
        assert_eq!(h.depth(), 3);
        assert_eq!(h.leaves().len(), 6);
    }

    #[test]
    fn quadrant_counts() {
        let p = walled_quadrants();
        assert_eq!(p.seats().len(), 42);
        assert_eq!(p.obstacles().len(), 4);
        let mut per = [0; 4];
        for s in p.seats() {
            per[quadrant(s.pos)] += 1;
        }
        assert_eq!(per, [11, 11, 10, 10]);
        assert_eq!(quadrant_teams().teams().iter().map(|t| t.desks).sum::<usize>(), 42);
    }

    #[test]
    fn medium_counts() {
        let p = medium_floor();
        assert_eq!(p.count_kind(SeatKind::Desk), 172);
        assert_eq!(p.count_kind(SeatKind::Office), 26);
        let h = medium_hierarchy();
        let root = h.team(h.index_of("Org").unwrap());
        assert_eq!((root.desks, root.offices), (167, 12));
        assert_eq!(h.depth(), 5);
        let e = eight_leaf_hierarchy();
        assert_eq!(e.depth(), 3);
        assert_eq!(e.leaves().len(), 8);
        let r = e.team(e.index_of("R").unwrap());
        assert!(r.desks <= 172 && r.offices <= 26);
    }

    #[test]
    fn random_instances_are_feasible_and_seeded() {
        for seed in 0..200 {
            let p = tiny_instance(seed);
            assert!(p.n_seats() <= 10 && p.n_teams() <= 3);
            p.check_feasible().unwrap();
        }
        for seed in 0..5 {
            let p = medium_instance(seed);
            p.check_feasible().unwrap();
            assert_eq!(medium_instance(seed).seats(), p.seats());
        }
    }
}
