#include "maxent/generating_vectors.hpp"

namespace maxent::qmc {

namespace {

// lattice-33002-1024-1048576.9125, components 1..256.
constexpr std::uint32_t kSurrogateVector[] = {
    1, 182667, 213731, 255351, 96013, 116671, 479315, 424089, 271103, 464421, 124483,
    230887, 392877, 162965, 109125, 168491, 216103, 5613, 207895, 506745, 189519,
    114879, 133967, 374257, 254597, 502087, 298245, 191333, 242099, 285991, 397887,
    507051, 511437, 129779, 406987, 345291, 225123, 511175, 432153, 306191, 116577, 809,
    370175, 402615, 485791, 201053, 366959, 54087, 395609, 211615, 68543, 443345,
    327293, 290819, 278623, 362043, 236117, 11091, 216837, 31545, 325799, 503877,
    410523, 88371, 240077, 423807, 479855, 330835, 134517, 329989, 473381, 59205,
    337775, 355995, 372243, 279827, 367217, 277741, 267077, 417971, 152599, 184949,
    511773, 397077, 520041, 98063, 52983, 91233, 363069, 23829, 424377, 225285, 171171,
    496765, 352791, 223231, 253273, 296195, 273379, 407265, 305849, 215121, 489851,
    245893, 397947, 174723, 329797, 213325, 357759, 346031, 131433, 110731, 487615,
    371877, 330799, 124595, 48775, 273275, 405083, 436731, 465257, 158265, 82033, 67805,
    203565, 190785, 351165, 19555, 210139, 236211, 197333, 217457, 437623, 304987,
    461169, 470529, 457011, 91823, 40575, 513857, 238575, 149779, 163017, 355521,
    438395, 429151, 510607, 252661, 255753, 219989, 146583, 138783, 262887, 22765,
    313675, 329005, 198699, 239305, 416211, 305549, 185961, 343313, 485961, 333207,
    400975, 334381, 317357, 270221, 175403, 179303, 341251, 11983, 497027, 145741,
    431637, 27489, 460319, 288665, 178737, 120329, 99851, 97789, 446355, 398323, 320921,
    399735, 301009, 58221, 20499, 496019, 201021, 18141, 401811, 7615, 13797, 56685,
    35433, 143763, 221013, 111635, 398843, 450531, 503423, 37261, 130555, 159743,
    114359, 283841, 168217, 148271, 69501, 450607, 283473, 13641, 443385, 338995, 8113,
    30043, 442875, 502897, 336337, 110527, 514381, 200349, 27787, 38955, 214547, 231515,
    315083, 458703, 136455, 23359, 247081, 448209, 421023, 417125, 314287, 335073,
    315409, 131405, 495049, 459151, 444599, 458887, 36639, 512851, 431191, 257755,
    336191, 80771, 209571, 201763, 476611, 66875, 216789, 426571,
};

// lattice-32001-1024-1048576.3600, components 1..10. Not checked against the
// published file; see README before relying on it for d >= 3.
constexpr std::uint32_t kCubatureVector[] = {
    1, 182667, 469891, 498753, 110745, 446247, 250185, 118627, 245333, 283199,
};

}  // namespace

std::span<const std::uint32_t> surrogate_generating_vector() { return kSurrogateVector; }

std::span<const std::uint32_t> cubature_generating_vector() { return kCubatureVector; }

}  // namespace maxent::qmc
