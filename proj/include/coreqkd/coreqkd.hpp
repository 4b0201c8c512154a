// coreqkd.hpp
// Umbrella header.

#pragma once

#include "adversary.hpp"
#include "block.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "core_ops.hpp"
#include "device.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "protocol.hpp"
#include "quantum.hpp"
#include "random.hpp"
