#pragma once

#include "kmrates/checked.hpp"
#include "kmrates/rate.hpp"
#include "kmrates/space.hpp"
#include "kmrates/uc_modulus.hpp"
#include "kmrates/moduli.hpp"
#include "kmrates/operators.hpp"
#include "kmrates/schedule.hpp"
#include "kmrates/certificates.hpp"
#include "kmrates/engine.hpp"
#include "kmrates/verify.hpp"
#include "kmrates/config.hpp"
#include "kmrates/report.hpp"
