use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// +1 for the left foot, −1 for the right; the left foot sits on the +y side.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Per-step walking command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepCommand {
    pub l_sx: f64,
    pub l_sy: f64,
    pub l_stheta: f64,
    pub t_ss: f64,
    #[serde(default)]
    pub t_ds: f64,
}

impl StepCommand {
    pub fn step_time(&self) -> f64 {
        self.t_ss + self.t_ds
    }

    pub fn is_walking(&self) -> bool {
        self.t_ss > 0.0
    }
}

impl Default for StepCommand {
    fn default() -> Self {
        Self { l_sx: 0.0, l_sy: 0.0, l_stheta: 0.0, t_ss: 0.4, t_ds: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepConstraints {
    pub max_step_length: f64,
    pub max_step_width: f64,
    pub max_step_rotation: f64,
    pub lateral_separation: f64,
    pub crossing_margin: f64,
    pub foot_length: f64,
    pub foot_width: f64,
}

impl Default for StepConstraints {
    fn default() -> Self {
        Self {
            max_step_length: 0.15,
            max_step_width: 0.06,
            max_step_rotation: 0.4,
            lateral_separation: 0.1,
            crossing_margin: 0.01,
            foot_length: 0.16,
            foot_width: 0.09,
        }
    }
}

impl StepConstraints {
    /// Clamp a command into the admissible box; the flag reports whether anything moved.
    pub fn clamp(&self, cmd: &StepCommand) -> (StepCommand, bool) {
        let out = StepCommand {
            l_sx: cmd.l_sx.clamp(-self.max_step_length, self.max_step_length),
            l_sy: cmd.l_sy.clamp(-self.max_step_width, self.max_step_width),
            l_stheta: cmd.l_stheta.clamp(-self.max_step_rotation, self.max_step_rotation),
            ..*cmd
        };
        let changed = out != *cmd;
        (out, changed)
    }
}

/// A planted foot: world position, heading and which foot it is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Footstep {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub side: Side,
}

impl Footstep {
    pub fn new(x: f64, y: f64, heading: f64, side: Side) -> Self {
        Self { x, y, heading, side }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FootstepPlan {
    pub steps: Vec<Footstep>,
    pub lateral_separation: f64,
    /// Set when the command or a placement had to be clamped.
    pub clamped: bool,
}

impl FootstepPlan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,x,y,heading,side\n");
        for (i, f) in self.steps.iter().enumerate() {
            out.push_str(&format!("{i},{},{},{},{}\n", f.x, f.y, f.heading, f.side.as_str()));
        }
        out
    }
}

/// Place the swing foot given the current support foot.
///
/// The heading is turned first, then the displacement `(L_sx, ±sep + L_sy)`
/// is applied in the new heading frame.
pub fn next_footstep(support: &Footstep, cmd: &StepCommand, constraints: &StepConstraints) -> (Footstep, bool) {
    let (cmd, mut clamped) = constraints.clamp(cmd);
    let side = support.side.other();
    let sign = side.sign();
    let mut lateral = sign * constraints.lateral_separation + cmd.l_sy;
    let min_offset = 0.5 * constraints.lateral_separation - constraints.crossing_margin;
    if sign * lateral < min_offset {
        lateral = sign * min_offset;
        clamped = true;
    }
    let heading = support.heading + cmd.l_stheta;
    let (s, c) = heading.sin_cos();
    let step = Footstep {
        x: support.x + c * cmd.l_sx - s * lateral,
        y: support.y + s * cmd.l_sx + c * lateral,
        heading,
        side,
    };
    (step, clamped)
}

/// Support foot for the first step: stepping or turning right leads with the right foot.
pub fn first_support(cmd: &StepCommand) -> Side {
    if cmd.l_sy < 0.0 || (cmd.l_sy == 0.0 && cmd.l_stheta < 0.0) {
        Side::Left
    } else {
        Side::Right
    }
}

/// Plan `n_steps` placements after `start`, which is the current support foot.
pub fn plan_footsteps(
    cmd: &StepCommand,
    n_steps: usize,
    start: &Footstep,
    constraints: &StepConstraints,
) -> FootstepPlan {
    let mut steps = Vec::with_capacity(n_steps);
    let mut clamped = false;
    let mut support = *start;
    for _ in 0..n_steps {
        let (next, c) = next_footstep(&support, cmd, constraints);
        clamped |= c;
        steps.push(next);
        support = next;
    }
    FootstepPlan { steps, lateral_separation: constraints.lateral_separation, clamped }
}
