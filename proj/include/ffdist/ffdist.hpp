#pragma once

// Library umbrella: field arithmetic, transforms, spheres, identities, distance sets.
// The harness (harness.hpp, cli.hpp) additionally needs the vendored json and CLI11 headers.

#include "ffdist/characters.hpp"
#include "ffdist/distance.hpp"
#include "ffdist/error.hpp"
#include "ffdist/field.hpp"
#include "ffdist/identities.hpp"
#include "ffdist/parallel.hpp"
#include "ffdist/rng.hpp"
#include "ffdist/spheres.hpp"
#include "ffdist/vectorspace.hpp"
