#pragma once

#include "tcmc/fixtures.hpp"

namespace fixtures = tcmc::fixtures;
