//! Reference values computed in 60-digit arithmetic (mpmath) and frozen here.
//! Mittag-Leffler values were checked by two independent routes (series and
//! spectral integral) and M-Wright values by series and Kanter integral.

#![allow(dead_code)]

pub const GAMMA: &[(f64, f64)] = &[
    (0.1, 9.5135076986687312858),
    (0.5, 1.7724538509055160273),
    (1.5, 0.88622692545275801365),
    (2.5, 1.3293403881791370205),
    (3.7, 4.1706517837966040301),
    (10.1, 454760.75144158558538),
    (33.3, 7.4875775965226323274e+35),
    (77.7, 3.938919638429316487e+112),
    (120.5, 6.1002949740240058744e+197),
    (150.25, 1.3321507761951634843e+261),
    (169.9, 2.5552232692967770932e+304),
    (170.5, 5.5620924145599996107e+305),
    (-0.5, -3.5449077018110320546),
    (-1.5, 2.3632718012073547031),
    (-2.25, -1.7428148657282526509),
    (-10.3, -5.2623632395356095592e-7),
    (-33.7, 3.8002295682917067193e-38),
    (-99.5, 3.3704592739067170354e-157),
    (-150.2, -3.4314101290798540687e-263),
    (-169.6, 3.5534288264724112174e-306),
];

pub const ML_HALF_NEG: &[(f64, f64)] = &[
    (0.0, 1.0),
    (0.25, 0.77034654773099674392),
    (0.5, 0.61569034419292587487),
    (0.75, 0.50693765029314480579),
    (1.0, 0.42758357615580700441),
    (1.25, 0.36782291645236109293),
    (1.5, 0.32158541645431750235),
    (1.75, 0.28497223473743638921),
    (2.0, 0.25539567631050574387),
    (2.25, 0.23108725873039186996),
    (2.5, 0.21080636406114358065),
    (2.75, 0.1936620962790686786),
    (3.0, 0.17900115118138995042),
    (3.25, 0.16633534842682187676),
    (3.5, 0.1552936556088942974),
    (3.75, 0.14558972127503853905),
    (4.0, 0.13699945762506138989),
    (4.25, 0.1293452747859879108),
    (4.5, 0.12248480427384141755),
    (4.75, 0.11630270721024730767),
    (5.0, 0.11070463773306862637),
];

pub const ML_GENERAL: &[(f64, f64, f64)] = &[
    (0.1, -0.3, 0.7596125317784889446),
    (0.1, -1.0, 0.48556446431108210159),
    (0.1, -2.0, 0.32001533595972739861),
    (0.1, -4.0, 0.19013365426129279333),
    (0.1, -8.0, 0.1049078073275958362),
    (0.1, -15.0, 0.058783452847323404659),
    (0.1, -30.0, 0.03026597587087465188),
    (0.1, -50.0, 0.01837805701221919541),
    (0.1, 0.5, 2.0770042471194151855),
    (0.1, 1.0, 23.160534598113205163),
    (0.1, 2.0, f64::INFINITY),
    (0.3, -0.3, 0.74425667319976158834),
    (0.3, -1.0, 0.45659440832969067062),
    (0.3, -2.0, 0.29023222616787535504),
    (0.3, -4.0, 0.16650174431551664971),
    (0.3, -8.0, 0.089493095818620724136),
    (0.3, -15.0, 0.04938939823021462603),
    (0.3, -30.0, 0.025182617502927663383),
    (0.3, -50.0, 0.015228201501814695234),
    (0.3, 0.5, 2.0620157899559994895),
    (0.3, 1.0, 8.0406755969670582905),
    (0.3, 2.0, 79485.907625183568623),
    (0.5, -0.3, 0.73459933456765514992),
    (0.5, -1.0, 0.42758357615580700441),
    (0.5, -2.0, 0.25539567631050574387),
    (0.5, -4.0, 0.13699945762506138989),
    (0.5, -8.0, 0.069985166200880927723),
    (0.5, -15.0, 0.037529606388505765746),
    (0.5, -30.0, 0.018795888861416751497),
    (0.5, -50.0, 0.0112815362653237725),
    (0.5, 0.5, 1.9523604891825570933),
    (0.5, 1.0, 5.0089800807622834663),
    (0.5, 2.0, 108.94090438997797241),
    (0.7, -0.3, 0.73154067570065076036),
    (0.7, -1.0, 0.39961197811559939027),
    (0.7, -2.0, 0.21378672701529727534),
    (0.7, -4.0, 0.099760254890514628716),
    (0.7, -8.0, 0.046069992385362385726),
    (0.7, -15.0, 0.023501440278040016091),
    (0.7, -30.0, 0.011444251527526973394),
    (0.7, -50.0, 0.0067936656703830938718),
    (0.7, 0.5, 1.8249850568512024814),
    (0.7, 1.0, 3.7041461454375862416),
    (0.7, 2.0, 20.966433131481956304),
    (0.9, -0.3, 0.73584527664843058747),
    (0.9, -1.0, 0.37606602142464187902),
    (0.9, -2.0, 0.16352830001693004278),
    (0.9, -4.0, 0.0504111033144346163),
    (0.9, -8.0, 0.017095144580796805831),
    (0.9, -15.0, 0.007928602432344447057),
    (0.9, -30.0, 0.003713707698459852111),
    (0.9, -50.0, 0.0021753530768569760498),
    (0.9, 0.5, 1.7043087220993991136),
    (0.9, 1.0, 2.9749390749704473833),
    (0.9, 2.0, 9.6049277845715006791),
    (0.99, -0.3, 0.74023850142995859238),
    (0.99, -1.0, 0.3685483180603396169),
    (0.99, -2.0, 0.13821728069806402839),
    (0.99, -4.0, 0.021827786633989432737),
    (0.99, -8.0, 0.0020917316290584062956),
    (0.99, -15.0, 0.00078316696851676205515),
    (0.99, -30.0, 0.00035975605168217239754),
    (0.99, -50.0, 0.0002095764990060077155),
    (0.99, 0.5, 1.6541261938718982692),
    (0.99, 1.0, 2.7416571893307095386),
    (0.99, 2.0, 7.5665119538014304347),
];

pub const M_WRIGHT: &[(f64, f64, f64)] = &[
    (0.1, 0.0, 0.93577872091287276926),
    (0.1, 0.2, 0.77854008038965199529),
    (0.1, 0.7, 0.48994302732521013609),
    (0.1, 1.0, 0.37029046275149084335),
    (0.1, 2.0, 0.14406688865856316572),
    (0.1, 3.5, 0.034006370842480310249),
    (0.1, 6.0, 0.0028795327771294667295),
    (0.1, 10.0, 0.00004860528275392853773),
    (0.1, 20.0, 1.0792461643143196455e-9),
    (0.1, 30.0, 1.4273835425032098487e-14),
    (0.3, 0.0, 0.77038318386656600928),
    (0.3, 0.2, 0.68253133450537963821),
    (0.3, 0.7, 0.48781279567945465187),
    (0.3, 1.0, 0.39052334188638717881),
    (0.3, 2.0, 0.16840030622678312291),
    (0.3, 3.5, 0.037312894563441080753),
    (0.3, 6.0, 0.0017858919284447766859),
    (0.3, 10.0, 4.6816026111378416207e-6),
    (0.3, 20.0, 2.2420155448927659269e-14),
    (0.3, 30.0, 1.043506497656301681e-24),
    (0.5, 0.0, 0.56418958354775628695),
    (0.5, 0.2, 0.55857580339446847095),
    (0.5, 0.7, 0.49914185607230485729),
    (0.5, 1.0, 0.43939128946772239705),
    (0.5, 2.0, 0.20755374871029735167),
    (0.5, 3.5, 0.026387497965075187331),
    (0.5, 6.0, 0.000069626525973373926945),
    (0.5, 10.0, 7.8354332655086676541e-12),
    (0.5, 20.0, 2.098828115677208445e-44),
    (0.5, 30.0, 1.0843428881615335243e-98),
    (0.7, 0.0, 0.33427275256419060597),
    (0.7, 0.2, 0.38955947734925278444),
    (0.7, 0.7, 0.5176701298533039739),
    (0.7, 1.0, 0.55342144306656066019),
    (0.7, 2.0, 0.24912885806519596465),
    (0.7, 3.5, 0.00027119513703021587146),
    (0.7, 6.0, 1.0699960978609025962e-22),
    (0.7, 10.0, 2.0035661278655414164e-122),
    (0.7, 20.0, 0.0),
    (0.7, 30.0, 0.0),
    (0.9, 0.0, 0.10511370061117775642),
    (0.9, 0.2, 0.14970970945688594926),
    (0.9, 0.7, 0.45666979048315859164),
    (0.9, 1.0, 1.0081467456212712044),
    (0.9, 2.0, 7.8193669162217516934e-17),
    (0.9, 3.5, 0.0),
    (0.9, 6.0, 0.0),
    (0.9, 10.0, 0.0),
    (0.9, 20.0, 0.0),
    (0.9, 30.0, 0.0),
];

pub const TAU_B_OHMIC: f64 = 0.58285145775505512154;
pub const ML_HALF_AT_MINUS_SQRT2: f64 = 0.33620400244634121285;
pub const ML_HALF_AT_MINUS_ONE_SQUARED: f64 = 0.18282771459818880825;
pub const DIVISIBILITY_DEFECT_HALF: f64 = 0.15337628784815240461;
