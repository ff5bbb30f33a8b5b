#pragma once

// Convenience umbrella header.

#include "snowembed/cli.hpp"
#include "snowembed/dimension.hpp"
#include "snowembed/embedding.hpp"
#include "snowembed/errors.hpp"
#include "snowembed/generators.hpp"
#include "snowembed/metric_space.hpp"
#include "snowembed/nets.hpp"
#include "snowembed/params.hpp"
#include "snowembed/serialization.hpp"
#include "snowembed/verification.hpp"
