# Physics, codec, authentication and protocol models for the backscatter simulator
