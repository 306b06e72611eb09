// Opens and closes a region compiled for an extra instruction set. Every
// standard header a backend needs must be included before the region opens,
// so no inline library code is emitted with the wider ISA.

#if defined(__clang__)
#define SKEWFLOW_TARGET_BEGIN(isa) \
  _Pragma(SKEWFLOW_STR(clang attribute push(__attribute__((target(isa))), apply_to = function)))
#define SKEWFLOW_TARGET_END _Pragma("clang attribute pop")
#elif defined(__GNUC__)
#define SKEWFLOW_TARGET_BEGIN(isa) \
  _Pragma("GCC push_options") _Pragma(SKEWFLOW_STR(GCC target(isa)))
#define SKEWFLOW_TARGET_END _Pragma("GCC pop_options")
#endif

#define SKEWFLOW_STR(x) #x
