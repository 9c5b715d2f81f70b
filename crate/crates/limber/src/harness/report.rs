pub struct Report; pub struct ChannelRmse; pub struct ToleranceCheck;
