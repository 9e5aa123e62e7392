#pragma once

#include "scalp/clustering.hpp"
#include "scalp/color.hpp"
#include "scalp/io.hpp"
#include "scalp/metrics.hpp"
#include "scalp/path.hpp"
#include "scalp/types.hpp"
