pub struct JointTrajectory; pub struct SensorStreams;
pub fn synthesize_sensors() {}
