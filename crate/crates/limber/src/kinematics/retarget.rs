use crate::spatial::Rotation;

/// Maps a measured link rotation onto the corresponding retargeted frame
/// through a constant link-to-link rotation: `R_target = R_measured * map`.
pub fn retarget_orientation(measured: &Rotation, map: &Rotation) -> Rotation {
    *measured * *map
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_map_passes_through() {
        let human = Rotation::about_z(0.8) * Rotation::about_x(-0.3);
        let out = retarget_orientation(&human, &Rotation::identity());
        assert_relative_eq!(*out.matrix(), *human.matrix(), epsilon = 1e-15);
    }

    #[test]
    fn inverse_map_recovers_measurement() {
        let human = Rotation::about_y(1.1);
        let map = Rotation::about_z(0.6) * Rotation::about_x(0.2);
        let out = retarget_orientation(&retarget_orientation(&human, &map), &map.inverse());
        assert_relative_eq!(*out.matrix(), *human.matrix(), epsilon = 1e-12);
    }

    #[test]
    fn quarter_turns_compose_to_half_turn() {
        let half = std::f64::consts::FRAC_PI_2;
        let out = retarget_orientation(&Rotation::about_z(half), &Rotation::about_z(half));
        assert_relative_eq!(
            *out.matrix(),
            *Rotation::about_z(std::f64::consts::PI).matrix(),
            epsilon = 1e-12
        );
    }
}
