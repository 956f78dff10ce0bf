#pragma once

// Furniture arrangement pipeline: color palette construction, occupancy-grid
// repair, archive measures, latent generators and CMA-ME illumination.

#include <furnish/archive.hpp>
#include <furnish/cmaes.hpp>
#include <furnish/config.hpp>
#include <furnish/external_generator.hpp>
#include <furnish/generator.hpp>
#include <furnish/lsi.hpp>
#include <furnish/measures.hpp>
#include <furnish/palette.hpp>
#include <furnish/persistence.hpp>
#include <furnish/png_io.hpp>
#include <furnish/render.hpp>
#include <furnish/repair.hpp>
#include <furnish/tsne.hpp>
