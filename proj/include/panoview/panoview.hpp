#pragma once

#include "panoview/error.hpp"
#include "panoview/sphere.hpp"
#include "panoview/random.hpp"
#include "panoview/image.hpp"
#include "panoview/image_io.hpp"
#include "panoview/rps.hpp"
#include "panoview/metrics.hpp"
#include "panoview/reporting.hpp"
#include "panoview/io.hpp"
