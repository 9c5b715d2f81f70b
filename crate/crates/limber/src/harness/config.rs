// placeholder — full implementation follows the pipeline modules
#[derive(Clone, Debug)]
pub struct ScenarioConfig;
#[derive(Clone, Debug)]
pub enum ScenarioKind { IkTracking }
