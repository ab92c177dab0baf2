//! High-precision reference values (40-digit mpmath) for the error-function tests.

/// `(x, erfc(x))` on 50 uniformly spaced points of [-6, 6].
pub const REAL_ERFC: [(f64, f64); 50] = [
    (-6.0, 1.9999999999999999785),
    (-5.7551020408163263, 1.9999999999999996013),
    (-5.5102040816326534, 1.9999999999999934359),
    (-5.2653061224489797, 1.9999999999999039819),
    (-5.0204081632653059, 1.9999999999987517929),
    (-4.7755102040816322, 1.9999999999855770326),
    (-4.5306122448979593, 1.9999999998518354301),
    (-4.2857142857142856, 1.9999999986465087527),
    (-4.0408163265306118, 1.9999999890022919949),
    (-3.795918367346939, 1.9999999204909577329),
    (-3.5510204081632653, 1.9999994883750472957),
    (-3.306122448979592, 1.9999970685203190992),
    (-3.0612244897959182, 1.9999850365135425191),
    (-2.8163265306122449, 1.9999319169182806087),
    (-2.5714285714285716, 1.9997236850716134245),
    (-2.3265306122448979, 1.9989988777032648389),
    (-2.0816326530612246, 1.9967586715825604418),
    (-1.8367346938775508, 1.9906104480691648146),
    (-1.591836734693878, 1.9756269434529250719),
    (-1.3469387755102042, 1.9432016088800122857),
    (-1.1020408163265305, 1.8808902224293265944),
    (-0.85714285714285676, 1.7745576830054867495),
    (-0.61224489795918391, 1.6134248530682335999),
    (-0.36734693877551017, 1.3965927832280591288),
    (-0.12244897959183643, 1.1374814161014131108),
    (0.12244897959183643, 0.86251858389858688922),
    (0.36734693877551017, 0.60340721677194087119),
    (0.61224489795918391, 0.38657514693176640006),
    (0.85714285714285676, 0.2254423169945132505),
    (1.1020408163265305, 0.11910977757067340561),
    (1.3469387755102042, 0.056798391119987714273),
    (1.591836734693878, 0.024373056547074928138),
    (1.8367346938775508, 0.009389551930835185361),
    (2.0816326530612237, 0.0032413284174395713892),
    (2.3265306122448983, 0.0010011222967351589019),
    (2.5714285714285712, 0.00027631492838657617698),
    (2.816326530612244, 0.000068083081719391620141),
    (3.0612244897959187, 0.000014963486457480846649),
    (3.3061224489795915, 2.9314796809007847946e-6),
    (3.5510204081632661, 5.1162495270433347934e-7),
    (3.795918367346939, 7.9509042267067099275e-8),
    (4.0408163265306118, 1.0997708005065769429e-8),
    (4.2857142857142865, 1.3534912472915750405e-9),
    (4.5306122448979593, 1.4816456988241203075e-10),
    (4.7755102040816322, 1.4422967437666907754e-11),
    (5.0204081632653068, 1.2482071492899598371e-12),
    (5.2653061224489797, 9.6018145599415567138e-14),
    (5.5102040816326525, 6.5641403060648039943e-15),
    (5.7551020408163271, 3.9874244979148363991e-16),
    (6.0, 2.1519736712498913117e-17),
];

/// `(Re z, Im z, Re erfc z, Im erfc z)` at 50 random points with |z| ≤ 10,
/// excluding neighbourhoods of the complex zeros of erfc.
pub const COMPLEX_ERFC: [(f64, f64, f64, f64); 50] = [
    (-3.3900299999999999, -1.3592500000000001, 2.0000096326691232116, -1.4510023493204053225e-6),
    (-6.8855399999999998, 4.3569699999999996, 2.0000000000000201284, 2.3732989577278548279e-14),
    (2.4965329999999999, 4.8387219999999997, 3009338.4584230895838, -324332.14081869007727),
    (-7.1251819999999997, -1.366805, 2.0, 3.2477127191414741925e-23),
    (-0.33457799999999999, -2.279274, 44.629148065374428672, 10.840333816237730627),
    (-6.2649359999999996, -6.4739870000000002, 1.1259898995922971478, 0.20691845162050637821),
    (-5.4417559999999998, -6.8517260000000002, -2172217.8033214541875, 143148.63397789749303),
    (-9.3028910000000007, 1.6479459999999999, 2.0, 1.2803833244257901215e-38),
    (-3.8470469999999999, -6.4450960000000004, -29087522725.547124712, 10564408522.610444356),
    (-6.2088530000000004, 7.5299569999999996, -4376807.5546624818931, -586005.5055345103557),
    (-4.5774350000000004, 6.5357010000000004, 91690168.971454727969, 178194638.91028049547),
    (0.82187200000000005, 7.029236, 1.0657325099207433955e+20, -50156110113611944733.0),
    (-8.2943929999999995, 1.317304, 2.0, 8.36781012008672441e-33),
    (-2.904455, 6.8673960000000003, 4893630892045842.3234, 1070682034958816.3472),
    (0.77602700000000002, -8.6778919999999999, -1.3126498066731096245e+31, 1.2451312856787885986e+31),
    (3.1269149999999999, -3.9272019999999999, 30.431081273283214746, 9.6137052391863005644),
    (1.6725719999999999, -7.1509450000000001, 75668385612494092675.0, 9503368700223135273.5),
    (0.62786900000000001, -9.4028589999999994, 7.457490278526868889e+36, 6.8712508269796922552e+36),
    (-6.2634530000000002, 1.019166, 1.9999999999999999979, -7.9821342014812315101e-19),
    (3.483765, 4.0419869999999998, -5.2680215251942415173, 4.7167277439811347211),
    (0.27096900000000002, -3.4813869999999998, -28077.330859956063398, -6571.3336873055004703),
    (-5.4807290000000002, -5.7464409999999999, 1.1934857604806454218, 1.1486878624134304288),
    (-5.5694929999999996, -3.9327220000000001, 1.9999999868090735397, 6.0354612977475204953e-9),
    (-0.56319200000000003, -2.4957889999999998, 51.909757861212965994, -72.26567617790189243),
    (2.368668, -7.9760749999999998, 2.1775957406440240092e+23, 1.0394581395396681344e+24),
    (1.3550420000000001, 3.116657, -445.49695469027665421, 65.296518628995896531),
    (-3.2120540000000002, 7.1638099999999998, 46324315443722886.538, 1866597708294890.8951),
    (-7.0228640000000002, -4.9188739999999997, 1.9999999999993267229, 4.3996794767257197121e-13),
    (2.0384989999999998, 7.5309470000000003, 4.0581036376144274423e+21, -2.7164207623441019719e+21),
    (-4.1015050000000004, -5.5261339999999999, 47933.388789312388519, 56918.3024303516473),
    (-1.5927910000000001, 0.113566, 1.9775376767296601962, -0.0099592752384891731262),
    (0.62213700000000005, -2.449843, -25.641024001471635192, -60.683239828877768267),
    (-3.0236640000000001, 7.6735860000000002, 2.4532527651279075589e+20, 1.2495397794639304328e+20),
    (-9.4775690000000008, 1.317601, 2.0, 6.7452112430074693185e-42),
    (-7.9239439999999997, 5.5044230000000001, 1.999999999999999551, 5.8224138642999122758e-17),
    (-5.9862130000000002, -7.8309439999999997, -6142140193.7651979648, 2748387500.9746293203),
    (-0.10477300000000001, -5.5898560000000002, 3446170900816.6530886, 1534254202877.7286257),
    (0.35740100000000002, 9.2020119999999999, -8.149903158911855046e+34, -3.1246719660313260717e+35),
    (1.626115, -1.885513, 0.45398493269758752392, 0.33052371694427574668),
    (0.47285899999999997, 7.2442919999999997, -1.8667470224428263675e+21, -3.4057525499334362149e+21),
    (-1.8072760000000001, -0.91241099999999997, 2.0193462438286365115, -0.01192065671364706885),
    (1.923978, 4.3743749999999997, 385770.76194440276868, 464873.88088136948719),
    (2.7792659999999998, 7.8326969999999996, 9.4488260938921516471e+21, -9.3685316621222570717e+21),
    (-0.059336, 1.2146650000000001, 1.2914225502718858057, -2.4659766207965969734),
    (-1.27054, -4.0902390000000004, -299489.05235007028272, -393782.96065492683982),
    (5.0328350000000004, 5.9619140000000002, -749.59748247656378845, 1829.6025794124247357),
    (4.4428280000000004, -8.5289579999999994, 5.9963764318284132122e+20, 6.126047152954146628e+21),
    (5.4543200000000001, -6.4050690000000001, -228.29705583357829179, 5288.3527258577106823),
    (2.239814, 6.1115779999999997, -9177004875559.9590174, 2988137937176.4179038),
    (4.8086840000000004, 7.8466060000000004, 1438249417009068.4605, -2698643057777924.1439),
];

/// `(Re z, Im z, Re w z, Im w z)` at 40 random points with |z| ≤ 10.
pub const FADDEEVA: [(f64, f64, f64, f64); 40] = [
    (-4.1449280000000002, -6.9772559999999997, 26424887220652.576399, -92236719431548.522216),
    (-5.0707509999999996, -7.2847150000000003, 76608922092.449222371, 1514985839176.8662125),
    (1.955063, 3.7190569999999998, 0.11820354704147080316, 0.058923036353886802864),
    (-3.4349370000000001, 3.8079960000000002, 0.08281824550503889308, -0.07194923996996916709),
    (-5.261679, 5.3177669999999999, 0.054065260949916907335, -0.052548847571578628787),
    (-7.252624, -3.3298269999999999, -0.030042064340079939219, -0.064393578203294713835),
    (-2.7393459999999998, 6.8522189999999998, 0.070692903217617699712, -0.027760185450392981173),
    (-5.1377990000000002, -4.5416239999999997, -0.060796657202751587755, -0.063870805407934236927),
    (-3.2505579999999998, -3.8212429999999999, 108.34781276482387048, 32.334237771818305801),
    (-8.2930220000000006, 4.8004600000000002, 0.029820089606651320692, -0.050951619284616415888),
    (3.7800349999999998, 0.54109499999999999, 0.023478040695170039604, 0.15131796575786699111),
    (-9.4248290000000008, -2.4614530000000001, -0.014852124917697001626, -0.056260929383481187482),
    (-5.8748589999999998, 0.2422, 0.0041372960839015934225, -0.097312324011694549744),
    (5.4490610000000004, 4.0347609999999996, 0.050366802734168426086, 0.066541327103058390038),
    (6.9440359999999997, -1.563768, -0.01791793976950983071, 0.077952723944101903802),
    (-5.5081350000000002, -3.4963150000000001, -0.047361364945560915344, -0.07284820896686054518),
    (4.5498649999999996, -3.0450819999999998, -0.059030293718382471306, 0.085225694224239914308),
    (1.7722309999999999, -0.75796399999999997, -0.2975952000478048063, 0.33413994011178488398),
    (5.6549639999999997, -2.641537, -0.039414143212274356756, 0.082167926750889174278),
    (4.2861140000000004, -6.6363789999999998, 265529365023.76362496, 93893507104.208144118),
    (1.8503780000000001, 0.34429599999999999, 0.10420535734078769556, 0.3269817141238906212),
    (3.7118199999999999, 7.1765549999999996, 0.061941135270264920392, 0.031558346954298521801),
    (4.1151179999999998, -3.4258250000000001, -0.079999158168656580453, 0.080862513309178937884),
    (2.3772980000000001, -7.5418839999999996, -9.4380147425556965459e+21, -3.4141338157667781337e+22),
    (1.0726059999999999, -3.3622429999999999, 30745.9248967932286, 41186.992163482521108),
    (-0.21334900000000001, 8.5225449999999991, 0.065713221743848220687, -0.0016231374860381064808),
    (-2.511682, 5.3402419999999999, 0.086138530620343016177, -0.0394070986202112985),
    (-4.8190289999999996, 3.5474199999999998, 0.05713290477950836371, -0.075444057027444602253),
    (-0.56907099999999999, 0.63653499999999996, 0.46950693461674139543, -0.21439981429096748433),
    (-6.460928, -3.4124249999999998, -0.036792902421443143939, -0.068342237249473548064),
    (7.5181800000000001, 1.9742789999999999, 0.018868400434667225083, 0.070637374702873087902),
    (-5.6251939999999996, 2.7890999999999999, 0.041067484528541769585, -0.080688752297011818156),
    (-6.3594999999999997, -2.9358149999999998, -0.034571603678137932612, -0.073337082156675785244),
    (-6.6062380000000003, 5.8358970000000001, 0.042711226023838220938, -0.047729197024824232649),
    (-6.1918389999999999, 7.3890060000000002, 0.045008635505774983245, -0.037314309825990608892),
    (-7.5957059999999998, 4.4336010000000003, 0.032756276855107671472, -0.055388644711289183081),
    (9.2057319999999994, -0.028218, -0.0001912857701362944954, 0.061654363559812200017),
    (4.7343010000000003, -2.2798289999999999, -0.048561567365518622486, 0.097094265914842086179),
    (-3.6863079999999999, 9.1853829999999999, 0.052780539812053212409, -0.020970033853833286578),
    (-1.6941999999999999, 9.5246870000000001, 0.057151801774195043247, -0.010059898125080196007),
];
