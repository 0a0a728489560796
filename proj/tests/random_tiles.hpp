#pragma once

#include "tfa/random_configs.hpp"

namespace tfa::testing {}
